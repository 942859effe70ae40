use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter combination that cannot be turned into a runnable setup.
    #[error("configuration: {0}")]
    Config(String),

    /// A stream generator was asked for an instance it cannot honestly build.
    #[error("generation: {0}")]
    Generation(String),

    /// A state machine was driven outside its contract.
    #[error("state: {0}")]
    State(String),

    /// Malformed stream or manifest data.
    #[error("parse: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }

    pub(crate) fn generation(msg: impl Into<String>) -> Self {
        Error::Generation(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
