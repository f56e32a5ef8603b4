//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the modeling operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A config file failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A record violated one of its invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// An operation precondition was violated.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// File system failure, with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
