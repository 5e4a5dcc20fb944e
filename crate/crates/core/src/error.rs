use thiserror::Error;

/// Failures raised by operations on foliation graphs.
///
/// Invariant violations found by [`crate::validate`] are reported as data, not
/// through this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid foliation graph: {0}")]
    Invalid(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown separatrix `{0}`")]
    UnknownEdge(String),
    #[error("move not applicable: {0}")]
    Inapplicable(String),
    #[error("rejected input: {0}")]
    Rejected(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
