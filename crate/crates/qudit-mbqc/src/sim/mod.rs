//! Statevector simulation: the reference semantics for every transformation.

mod gate;
mod sparse;
mod state;

pub use gate::GateKind;
pub use sparse::{SparseState, MAX_SUPPORT};
pub use state::{
    fidelity_up_to_phase, MeasurementBranch, StateVector, MAX_AMPLITUDES, ZERO_PROBABILITY,
};
