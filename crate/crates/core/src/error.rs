use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("bracket [e{i}, e{j}] listed twice (entries must satisfy i < j and appear once)")]
    AmbiguousBracket { i: usize, j: usize },

    #[error("bracket entry [e{i}, e{j}] must have i < j")]
    UnorderedBracket { i: usize, j: usize },

    #[error("Jacobi identity fails on (e{0}, e{1}, e{2})", .triple.0, .triple.1, .triple.2)]
    JacobiViolation { triple: (usize, usize, usize) },

    #[error("algebra is not nilpotent: lower central series stalls at dimension {stalled_at}")]
    NotNilpotent { stalled_at: usize },

    #[error("metric is not symmetric positive definite: {0}")]
    InvalidMetric(String),

    #[error("operation requires step {required}, algebra has step {actual}")]
    StepMismatch { required: String, actual: usize },

    #[error("closed-form product not available for step {0} (supported: step <= 3)")]
    StepUnsupported(usize),

    #[error("vector is not central")]
    NotCentral,

    #[error("matrix is not a derivation: defect on (e{0}, e{1})", .pair.0, .pair.1)]
    NonDerivation { pair: (usize, usize) },

    #[error("matrix is not skew-symmetric with respect to the metric")]
    NonSkew,

    #[error("matrix is not symmetric with respect to the metric")]
    NonSymmetric,

    #[error("integral is not polynomial: {0}")]
    NonPolynomialVariant(String),

    #[error("quotient denominator vanished (|f| = {value:e}) at sample {index}")]
    DenominatorVanished { index: usize, value: f64 },

    #[error("non-finite state after step {last_valid}")]
    NonFinite { last_valid: usize },

    #[error("predicate rejected every sample ({attempts} attempts)")]
    EmptyRegion { attempts: usize },

    #[error("unknown algebra `{0}`")]
    UnknownName(String),

    #[error("algebra `{0}` requires a parameter")]
    MissingParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is singular")]
    Singular,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
