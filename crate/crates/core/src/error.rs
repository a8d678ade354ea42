use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map onto three broad classes (bad input, exhausted
/// resource budget, numerical breakdown) so front ends can translate
/// them into stable exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("generator index {index} out of range for {len} generators")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("enumeration budget exceeded: {required} subsets needed, limit is {limit}")]
    BudgetExceeded { required: u128, limit: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
