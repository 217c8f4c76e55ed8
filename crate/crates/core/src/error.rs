use thiserror::Error;

/// Errors raised by samplers, evaluators and parsers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("sampler failed after {retries} retries: {reason}")]
    Sampler { retries: usize, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("discretization too coarse: {0}")]
    Discretization(String),

    #[error("contour resolution error: {0}")]
    Contour(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("range error: {0}")]
    Range(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
