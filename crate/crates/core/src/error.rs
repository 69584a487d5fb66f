use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not inside the open unit disk (|z| must stay below 1 - 1e-15)")]
    OutsideDisk { re: f64, im: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("a zero sequence needs at least one point")]
    EmptySequence,

    #[error("points {first} and {second} coincide (pseudohyperbolic distance {distance:e})")]
    DuplicatePoint {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} zeros")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("derivative requested at zero {index} without a matching exclude hint")]
    EvaluationAtZero { index: usize },

    #[error("inequality `{what}` violated by {excess:e}")]
    PrecisionViolation { what: String, excess: f64 },

    #[error("truncation depth {n} exceeds double precision resolution (max {max})")]
    TruncationTooDeep { n: usize, max: usize },

    #[error("perturbation sampling exhausted after {rounds} rounds")]
    SamplingExhausted { rounds: usize },

    #[error("nearness {nearness} exceeds radius {radius}")]
    NearnessExceeded { nearness: f64, radius: f64 },

    #[error("point {index} collides with a zero of the product")]
    ZeroCollision { index: usize },

    #[error("sequences are only {separation:e}-separated")]
    SeparationTooSmall { separation: f64 },

    #[error("kernel system residual {residual:e} too large; cross-check skipped")]
    IllConditioned { residual: f64 },

    #[error("nearness {nearness} is outside the contraction radius {threshold}")]
    ContractionViolated { nearness: f64, threshold: f64 },

    #[error("no convergence after {iterations} steps (residual {residual:e})")]
    MaxIterExceeded { iterations: usize, residual: f64 },

    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    #[error("root {index} failed verification (residual {residual:e})")]
    RootVerificationFailed { index: usize, residual: f64 },
}
