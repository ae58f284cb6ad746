use thiserror::Error;

/// Errors surfaced by configuration, file formats and the run machinery.
///
/// Structural API misuse (cross-tape arithmetic, mismatched dot lengths)
/// panics instead: those are programming errors, not run conditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown problem `{0}` (expected one of {1})")]
    UnknownProblem(String, String),

    #[error("unknown scenario `{0}` (valid ids: {1})")]
    UnknownScenario(String, String),

    #[error("nothing to report: empty record list")]
    EmptyReport,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
