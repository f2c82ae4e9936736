use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Dominance, Gale-Ryser and Kostka are only defined between partitions of the same `n`.
    #[error("dominance undefined across different n: {left} vs {right}")]
    WeightMismatch { left: u64, right: u64 },

    #[error("{what} infeasible: {value} exceeds cap {cap}")]
    AboveCap {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("{what} out of range: {value} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sampler gave up after {rejections} rejections")]
    RejectionLimit { rejections: u64 },

    #[error("covariance matrix of size {size} is not positive definite; retry with a jitter > 0")]
    NotPositiveDefinite { size: usize },

    #[error("root not bracketed on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("cannot parse partition from {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    /// Short stable identifier of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::WeightMismatch { .. } => "weight-mismatch",
            Error::AboveCap { .. } => "above-cap",
            Error::OutOfRange { .. } => "out-of-range",
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::RejectionLimit { .. } => "rejection-limit",
            Error::NotPositiveDefinite { .. } => "not-positive-definite",
            Error::BracketFailure { .. } => "bracket-failure",
            Error::Parse { .. } => "parse",
            Error::Degenerate(_) => "degenerate",
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
