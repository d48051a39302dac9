use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("composition index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("arity 0 is not supported")]
    ZeroArity,

    #[error("{0} is not a valid cell of arity {1}")]
    InvalidSequence(String, usize),

    #[error("not a cycle")]
    NotACycle,

    #[error("pi undefined at level 2 (generator {0})")]
    PiUndefined(&'static str),

    #[error("rho is only defined on level 0, got level {0}")]
    PositiveLevel(usize),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
