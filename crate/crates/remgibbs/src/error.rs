use thiserror::Error;

/// Crate-wide error type. Every message names the offending parameter and its
/// value so CLI users can see which input to fix.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The regime parameters are inconsistent (e.g. the derived tail mass
    /// `lambda_n` is not a probability at this population size).
    #[error("invalid regime: {0}")]
    Regime(String),
    /// A guard against requests that would exhaust memory or time.
    #[error("resource guard: {0}")]
    Resource(String),
    /// Invalid run configuration (CLI level).
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
