use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("size guard exceeded: {what} requires {size}, limit is {limit}")]
    Guard {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn guard(what: &'static str, size: u128, limit: u128) -> Self {
        Error::Guard { what, size, limit }
    }
}
