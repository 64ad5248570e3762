use thiserror::Error;

use crate::grid::Side;

/// Errors raised by the library. The CLI maps them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument `{field}`: {msg}")]
    InvalidArgument { field: String, msg: String },

    #[error("margin violated: {0}")]
    Margin(String),

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("expected a {expected}-side function, found {found}-side")]
    Side { expected: Side, found: Side },

    #[error("sequence truncated: {0}")]
    Truncated(String),

    #[error("overflow guard: {0}")]
    Overflow(String),

    #[error("malformed signal data: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field: field.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
