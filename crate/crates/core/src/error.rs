use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters that cannot describe a valid scheme or experiment.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Caller-supplied data (item lists, bit vectors) that violate a precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// A serialized container or description that could not be parsed.
    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
