//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation argument is outside its valid domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation point coincides with a source point.
    #[error("singular geometry: {0}")]
    Singularity(String),

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The channel correlation matrix is too close to singular for the
    /// non-parallel-channels assumption to hold.
    #[error("assumption violation: {0}")]
    AssumptionViolation(String),

    /// A matrix that must be positive definite is numerically rank deficient.
    #[error("rank deficient: {0}")]
    RankDeficient(String),

    /// Experiment configuration is inconsistent.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
