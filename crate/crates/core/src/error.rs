use thiserror::Error;

/// Errors raised by the computational modules and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    Parse(String),

    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),

    #[error("operands live in different coefficient domains")]
    DomainMismatch,

    #[error("constant term is not invertible in this domain")]
    NotInvertible,

    #[error("truncation order {have} is too small, need at least {need}")]
    InsufficientOrder { need: usize, have: usize },

    #[error("lambda must be nonzero here")]
    LambdaZero,

    /// A quantity that must be divisible by a power of lambda was not.
    /// This can only happen through an implementation defect.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
