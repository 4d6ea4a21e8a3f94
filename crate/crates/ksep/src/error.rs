use thiserror::Error;

/// Errors produced by state construction, criterion evaluation and the
/// closed-form noise analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("malformed state: {0}")]
    MalformedState(String),

    /// A rational detection function diverges at the requested point
    /// (white-noise fraction p = 1).
    #[error("unbounded: {0}")]
    Unbounded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
