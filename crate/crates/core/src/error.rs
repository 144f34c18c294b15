use thiserror::Error;

/// Errors raised by the numerical routines and the command-line driver.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested series or sum does not converge.
    #[error("divergent: {0}")]
    Divergence(String),

    /// The prime table does not reach far enough for the request.
    #[error("insufficient prime table: need primes up to {needed}, table limit is {limit}")]
    InsufficientTable { needed: u64, limit: u64 },

    /// A sampled graph is too coarse (or too short) for the requested analysis.
    #[error("resolution error: {message} (need at least {required_points} points)")]
    Resolution {
        message: String,
        required_points: usize,
    },

    /// Two evaluation routes that must agree did not.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Divergence(_) => "divergence",
            Error::InsufficientTable { .. } => "insufficient_table",
            Error::Resolution { .. } => "resolution",
            Error::Consistency(_) => "consistency",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
