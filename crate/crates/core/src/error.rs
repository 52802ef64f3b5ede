use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomial is not irreducible: {0}")]
    NonIrreducible(String),
    #[error("basis is not linearly independent over the base field")]
    BadBasis,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("method not applicable: {0}")]
    MethodInapplicable(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("budget exceeded after {visited} candidates")]
    BudgetExceeded { visited: u128 },
    #[error("division did not produce an integer: {0}")]
    NonIntegerResult(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
