use thiserror::Error;

/// Errors raised by the library. Budget exhaustion is not an error; it is
/// reported through [`crate::engine::RunRecord::success`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("label {label} is outside 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },

    #[error("label {0} occurs more than once")]
    DuplicateLabel(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state space too large: {0}")]
    TooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
