use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2, 4 or 8)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected {expected} entries, got {actual}")]
    EntryCount { expected: usize, actual: usize },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("kraus set violates completeness (deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("density matrix precondition violated: {0}")]
    InvalidDensityMatrix(String),

    #[error("rate {0} outside [0, 1]")]
    RateOutOfRange(f64),

    #[error("angle {value} outside [{min}, {max}]")]
    AngleOutOfRange { value: f64, min: f64, max: f64 },

    #[error("{0} is not a finite number")]
    NotFinite(&'static str),

    #[error("qubit index {0} outside 1..=3")]
    InvalidQubit(usize),

    #[error("outcome index {0} outside 1..=4")]
    InvalidOutcome(usize),

    #[error("no closed form for noise key {0}")]
    UnsupportedKey(String),

    #[error("shared-rate key {key} needs p1 == p2, got {p1} and {p2}")]
    UnequalSharedRate { key: String, p1: f64, p2: f64 },

    #[error("formula is singular at {0}")]
    Singular(String),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
