use thiserror::Error;

/// Errors raised by the toolkit. Every variant names the violated constraint.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("weight not locally integrable: {0}")]
    NotIntegrable(String),
    #[error("weight not A_p: {0}")]
    NotAp(String),
    #[error("level out of range: {0}")]
    Level(String),
    #[error("support violation: {0}")]
    Support(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("report i/o: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
