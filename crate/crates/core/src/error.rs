use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series must not be empty")]
    EmptySeries,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("series too short to normalize (length {len}, need at least 2)")]
    TooShortToNormalize { len: usize },

    #[error("cannot resample: {0}")]
    Resample(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid error model: standard deviation must be positive and finite, got {0}")]
    InvalidStd(f64),

    #[error("timestamp {index} has no observations")]
    EmptyTimestamp { index: usize },

    #[error("dataset `{name}`: series {index} has length {len}, expected {expected}")]
    RaggedDataset {
        name: String,
        index: usize,
        len: usize,
        expected: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large for exact enumeration ({combinations} materializations, cap {cap})")]
    TooLargeForExact { combinations: f64, cap: u64 },

    #[error("probability threshold must lie in (0, 1), got {0}")]
    InvalidTau(f64),

    #[error("no DUST table for error models {x} / {y}")]
    MissingDustTable { x: String, y: String },

    #[error("technique {technique} cannot answer this query: {reason}")]
    TechniqueMismatch { technique: String, reason: String },

    #[error("collection has {available} candidates, need at least {needed}")]
    NotEnoughCandidates { available: usize, needed: usize },

    #[error("ground truth must not be empty")]
    EmptyTruth,

    #[error("need at least {needed} samples, got {got}")]
    NotEnoughSamples { needed: usize, got: usize },

    #[error("{path}: row {row}: {message}")]
    Parse { path: PathBuf, row: usize, message: String },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by input data or files rather than by the
    /// caller's parameters.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Io { .. }
                | Error::Config { .. }
                | Error::RaggedDataset { .. }
                | Error::NonFinite { .. }
                | Error::EmptySeries
        )
    }
}
