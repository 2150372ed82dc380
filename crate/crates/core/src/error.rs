use thiserror::Error;

/// Errors raised by graph ingestion, estimators and privacy accounting.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{0}")]
    Amplification(String),

    #[error("undefined value: {0}")]
    Undefined(String),

    #[error("count overflow: {0}")]
    Overflow(&'static str),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
