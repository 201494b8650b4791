//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by estimators, tests and the batch pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Every sample in the requested window is a missing-value marker.
    #[error("station {station}: all values in the studied window are missing")]
    AllMissing { station: String },

    #[error("lag {lag} out of range for series of length {n}")]
    LagTooLarge { lag: usize, n: usize },

    /// Zero sample variance (constant series); no scale-dependent test applies.
    #[error("degenerate series: sample variance is zero")]
    DegenerateSeries,

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Long-run covariance of the moment functions is not positive definite;
    /// evaluation points are too numerous or too close for this sample size.
    #[error("singular long-run covariance estimate")]
    SingularCovariance,

    #[error("nonpositive long-run variance estimate")]
    NonpositiveLongRunVariance,

    /// Stick-breaking residual mass still at `residual` after `k_max` draws.
    #[error("stick-breaking truncation failed: residual {residual:e} after {k_max} weights")]
    TruncationFailure { residual: f64, k_max: usize },

    #[error("series too short: need more than {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("p-value {value} outside [0, 1]")]
    OutOfRange { value: f64 },

    #[error("ARMA coefficients are not stationary/invertible")]
    NonstationaryCoefficients,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("http error: {0}")]
    Http(String),

    #[error("unknown station {0}")]
    UnknownStation(String),

    /// The displacement variable is absent from the fetched record.
    #[error("variable {0} missing from fetched record")]
    MissingVariable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
