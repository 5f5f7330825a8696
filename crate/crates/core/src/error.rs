use thiserror::Error;

/// Errors produced while building weights, designing filters or smoothing signals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("over-parameterized fit: {columns} basis columns but only {rows} independent samples")]
    OverParameterized { columns: usize, rows: usize },

    #[error("design failure: {0}")]
    DesignFailure(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
