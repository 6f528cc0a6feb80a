use thiserror::Error;

use crate::QuditId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(u32),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("site index {0} out of range")]
    SiteOutOfRange(usize),
    #[error("unknown qudit {0}")]
    UnknownQudit(QuditId),
    #[error("qudit {0} listed more than once")]
    DuplicateQudit(QuditId),
    #[error("gate {gate} acts on {expected} qudits, got {got}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid gate parameters for {gate}: {reason}")]
    InvalidGate { gate: String, reason: String },
    #[error("object too large: {0}")]
    TooLarge(String),
    #[error("outcome {outcome} on qudit {qudit} has zero probability")]
    ZeroProbability { qudit: QuditId, outcome: u32 },
    #[error("missing forced outcome for qudit {0}")]
    MissingOutcome(QuditId),
    #[error("unsupported gate {gate} for {context}")]
    UnsupportedGate { gate: String, context: String },
    #[error("operation is not Clifford: {0}")]
    NonClifford(String),
    #[error("gate is not diagonal: {0}")]
    NotDiagonal(String),
    #[error("ill-formed pattern: {0}")]
    IllFormed(String),
    #[error("pattern is not {0}")]
    NotStandard(&'static str),
    #[error("cannot compose: {0}")]
    Composition(String),
    #[error("output qudits are still entangled with the rest of the register")]
    NotClean,
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
