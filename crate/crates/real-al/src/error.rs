//! Crate-wide error type with the exit-code classification used by the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A user-supplied argument or configuration value is out of range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was invoked outside its contract.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A dataset, checkpoint, or report file failed to parse.
    #[error("{path}: {message}")]
    DataFormat { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn data(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::DataFormat {
            path: path.into(),
            message: msg.into(),
        }
    }

    /// Process exit code: 2 for argument/contract errors, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Precondition(_) => 2,
            _ => 1,
        }
    }
}
