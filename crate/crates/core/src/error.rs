use thiserror::Error;

/// Errors produced by sequence construction, analysis and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible pair: {0}")]
    IncompatiblePair(String),

    /// A metric was requested that does not exist for the given pair
    /// (e.g. MCTTR without maximal rendezvous diversity).
    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
