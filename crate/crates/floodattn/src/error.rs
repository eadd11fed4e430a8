use thiserror::Error;

/// Crate-wide error type. Every fallible operation reports which
/// contract it violated rather than panicking.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A configuration or argument value is out of its legal range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Input data violates a documented precondition (bad token, bad label, ...).
    #[error("invalid data: {0}")]
    Data(String),
    /// Two sparse operands were expected to share a sparsity structure.
    #[error("structure mismatch: {0}")]
    Structure(String),
    /// The operation was called in a state that cannot serve it.
    #[error("invalid state: {0}")]
    State(String),
    /// An index fell outside its container.
    #[error("index out of range: {0}")]
    Index(String),
    /// A file could not be parsed in the expected format.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
