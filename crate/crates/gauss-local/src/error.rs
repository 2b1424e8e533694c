use thiserror::Error;

/// Errors produced by the library layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("nonfinite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singularity exponent {alpha} is not integrable in dimension {dim}")]
    NonIntegrable { alpha: f64, dim: usize },

    #[error("degenerate ball: {0}")]
    DegenerateBall(String),

    #[error("dimension {dim} is not supported by the deterministic quadrature path")]
    UnsupportedDimension { dim: usize },

    #[error("covering construction failed: {0}")]
    CoveringFailed(String),

    #[error("atom construction failed: {0}")]
    AtomConstruction(String),

    #[error("function evaluation produced a nonfinite value at {at:?}")]
    EvaluationFailed { at: Vec<f64> },

    #[error("missing compact support metadata: {0}")]
    MissingSupport(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
