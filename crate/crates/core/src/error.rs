use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A computation would exceed a declared size cap.
    #[error("infeasible: {what} (limit {limit}, requested {requested})")]
    Infeasible {
        what: &'static str,
        limit: u64,
        requested: u64,
    },

    #[error("cannot parse bit string: unexpected character {0:?}")]
    Parse(char),

    /// Evidence that cannot come from either hypothesis (both likelihoods vanish,
    /// or one trace rules out each source).
    #[error("inconsistent evidence: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
