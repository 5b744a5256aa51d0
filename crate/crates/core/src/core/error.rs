use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the sampler, diagnostics, and persistence layers.
#[derive(Debug, Error)]
pub enum Error {
    /// The current state has zero target density; the chain was initialized
    /// (or forced) outside the support.
    #[error("chain left support: log-density is -inf at the current state")]
    ChainLeftSupport,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("schedule time overflow at k={k}")]
    ScheduleOverflow { k: u64 },

    #[error("degenerate series: variance is zero")]
    DegenerateSeries,

    #[error("empty reservoir")]
    EmptyReservoir,

    #[error("auxiliary state outside auxiliary support")]
    AuxOutsideSupport,

    #[error("non-finite log weight: {0}")]
    NonFiniteWeight(f64),

    #[error("probability vector not normalized: sums to {0}")]
    NotNormalized(f64),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
