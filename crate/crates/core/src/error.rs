use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole {index} of the {branch} branch has negative damping {value}")]
    NegativeDamping {
        branch: &'static str,
        index: usize,
        value: f64,
    },
    #[error("pole {index} of the {branch} branch has non-positive coupling {value}")]
    NonPositiveCoupling {
        branch: &'static str,
        index: usize,
        value: f64,
    },
    #[error("pole {index} of the {branch} branch has negative resonance {value}")]
    NegativeResonance {
        branch: &'static str,
        index: usize,
        value: f64,
    },
    #[error("vacuum constants must be positive (eps0 = {eps0}, mu0 = {mu0})")]
    NonPositiveVacuum { eps0: f64, mu0: f64 },
    #[error("response evaluated at an undamped resonance (pole {index}, omega = {omega})")]
    PoleSingularity { index: usize, omega: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("per-cell media do not share one layout: {0}")]
    LayoutMismatch(String),
    #[error("field arrays are identically zero")]
    ZeroField,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {dim} exceeds the limit {limit} for this operation")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("time step must be non-negative, got {0}")]
    NegativeTimeStep(f64),
    #[error("matrix is not of the single-ancilla dilation form: {0}")]
    StructureViolation(String),
    #[error("block is not unitary (residual {0:e})")]
    NonUnitaryBlock(f64),
    #[error("post-selected branch has vanishing probability {0:e}")]
    ZeroProbabilityBranch(f64),
    #[error("rates must be positive with min <= max (min = {min}, max = {max})")]
    NonPositiveRate { min: f64, max: f64 },
    #[error("invalid evolution plan: {0}")]
    InvalidPlan(String),
    #[error("fit needs at least two points")]
    UndefinedSlope,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("validation error at `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
