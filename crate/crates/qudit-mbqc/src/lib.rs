//! Qudit measurement-based quantum computation as a compiler stack.
//!
//! Circuits and measurement patterns are the two intermediate
//! representations. Patterns can be rewritten into completely standard form,
//! converted to and from circuits, and compiled into constant-depth circuits
//! over the unbounded fan-out gate set. A dense statevector simulator is the
//! reference semantics used to check every transformation.

pub mod algebra;
pub mod circuit;
pub mod convert;
pub mod error;
pub mod io;
pub mod pattern;
pub mod random;
pub mod rewrite;
pub mod sim;
pub mod stabilizer;
pub mod verify;

pub use algebra::{CliffordGenerator, Dim, PauliOperator, C64};
pub use circuit::{Circuit, DepthReport, GateModel, Op};
pub use error::{Error, Result};
pub use pattern::{Command, Pattern, Signal};
pub use sim::{GateKind, SparseState, StateVector};

/// Qudit identifier shared by circuits, patterns and states.
pub type QuditId = u32;
