use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected d = {expected}, found d = {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported boundary dimension {0} (only d = 1 and d = 2)")]
    UnsupportedDimension(usize),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("ambiguous classification: |tr^2 - 4| = {deviation:e} lies in the undecidable band")]
    AmbiguousClass { deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown builtin group `{0}`")]
    UnknownGroup(String),
    #[error("group appears non-discrete: {0}")]
    NonDiscrete(String),
    #[error("empty limit sample")]
    EmptySample,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("horoball family: {0}")]
    Horoballs(String),
    #[error("divergent weighting: s = {s} is below the measured orbit growth rate {growth}")]
    DivergentWeighting { s: f64, growth: f64 },
    #[error("profile invariant violated: {0}")]
    InvalidProfile(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
