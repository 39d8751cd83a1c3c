//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument was zero where a nonzero value is required.
    #[error("argument must be nonzero")]
    ZeroInput,

    /// An argument was nonpositive where a positive value is required.
    #[error("argument must be positive")]
    NonPositive,

    /// Jacobi symbols require a positive odd modulus.
    #[error("modulus must be a positive odd integer")]
    EvenModulus,

    /// Operation defined only for nonzero discriminant.
    #[error("discriminant is zero")]
    ZeroDiscriminant,

    /// Operation defined only for positive square discriminant.
    #[error("discriminant is not a positive square")]
    NotSquareDiscriminant,

    /// Intermediate value exceeded the fixed-width integer range.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// Parameter violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A consistency check that should hold by construction failed.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
