use thiserror::Error;

/// Errors raised by the numerical operators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid exponent {value}: {reason}")]
    InvalidExponent { value: f64, reason: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("times must be strictly increasing (index {index})")]
    NotIncreasing { index: usize },

    #[error("{what} has {len} entries; the exhaustive oracle is limited to {max}")]
    TooLarge { what: &'static str, len: usize, max: usize },

    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("threshold {lambda} is below the root-cube average {root_average}")]
    ThresholdBelowRootAverage { lambda: f64, root_average: f64 },

    #[error("operator is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("invalid markov operator: {0}")]
    InvalidOperator(String),

    #[error("fixture parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
