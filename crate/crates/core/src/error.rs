//! Crate-wide error type.
//!
//! Variants map one-to-one onto the CLI exit classes: `InvalidArgument` is a
//! usage error, `Parse`/`Format`/`Alignment`/`Io` are input errors, and
//! `Numeric` is a numerical failure.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a precondition (bad dimension, bad flag value, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A text input failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A binary payload is malformed.
    #[error("format error: {0}")]
    Format(String),

    /// Two inputs that must describe the same units do not line up.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// A numerical routine could not complete (factorization failure, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
