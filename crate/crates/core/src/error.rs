use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("problem has {n} variables, exhaustive search is capped at {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("topology has {available} active nodes, problem needs {required}")]
    InsufficientNodes { required: usize, available: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing value for node {0}")]
    MissingNode(usize),

    #[error("no edge between {0} and {1}")]
    MissingEdge(usize, usize),

    #[error(transparent)]
    Transport(#[from] TransportError),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Failure talking to an external sampler process.
///
/// `lines_read` and `expected` describe how far the response got before the
/// failure so a partially written answer can be diagnosed.
#[derive(Debug, Error)]
#[error("transport: {message} (read {lines_read} of {expected} response lines)")]
pub struct TransportError {
    pub message: String,
    pub lines_read: usize,
    pub expected: usize,
}

impl TransportError {
    pub fn new(message: impl Into<String>, lines_read: usize, expected: usize) -> Self {
        Self {
            message: message.into(),
            lines_read,
            expected,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidValue(msg.into())
}
