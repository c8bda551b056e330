use thiserror::Error;

/// Errors produced by the ray-space computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state dimension must be at least 2 (got {0})")]
    DimensionTooSmall(usize),

    #[error("state has zero or non-finite norm")]
    ZeroNorm,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("undefined relative phase: |overlap| = {modulus:e} is below threshold ({context})")]
    UndefinedPhase { modulus: f64, context: String },

    #[error("orthogonal pair at nodes ({0}, {1})")]
    OrthogonalPair(usize, usize),

    #[error("curve needs at least {needed} nodes (got {got})")]
    TooFewNodes { needed: usize, got: usize },

    #[error("curve parameters must be strictly increasing (violated at node {0})")]
    NonIncreasingParams(usize),

    #[error("junction rays do not match (ray distance {0:e})")]
    JunctionMismatch(f64),

    #[error("vanishing denominator Δ₂ between vertices {0} and {1}")]
    VanishingDenominator(usize, usize),

    #[error("point outside chart domain at parameter {0}")]
    DomainViolation(String),

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("metric is not positive definite (min eigenvalue {0:e})")]
    SingularMetric(f64),

    #[error("shooting did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("state lies outside the Darboux chart (overlap with base {0:e})")]
    OutsideChart(f64),

    #[error("no connector between vertices {0} and {1}: {2}")]
    ConnectorUnavailable(usize, usize, String),

    #[error("loop is not closed (gap {0:e})")]
    OpenLoop(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
