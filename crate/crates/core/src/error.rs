use thiserror::Error;

/// Errors produced by table builders, evaluators, and the counting sieve.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated; the message names the
    /// violated condition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Arguments were individually valid but the resulting bound is vacuous.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format error: {0}")]
    CacheFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn infeasible(msg: impl Into<String>) -> Error {
    Error::Infeasible(msg.into())
}
