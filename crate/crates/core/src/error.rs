use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size mismatch: {0}")]
    Size(String),

    #[error("index {index} out of range for {len} modes")]
    Index { index: usize, len: usize },

    #[error("non-finite or invalid numeric value: {0}")]
    Numeric(String),

    #[error("input state is not normalized (norm² = {0})")]
    Normalization(f64),

    #[error("value outside its domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unitary does not implement a post-selected CNOT (best pattern mass {best:.6})")]
    NotCnot { best: f64 },

    #[error("logical phase undefined for input {input}: amplitude magnitude {magnitude:.3e}")]
    UndefinedPhase { input: usize, magnitude: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("abscissae must be strictly increasing (row {row})")]
    Ordering { row: usize },

    #[error("table needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("ordinates are not strictly monotone (row {row})")]
    NonMonotone { row: usize },

    #[error("query {value} outside table range [{min}, {max}]")]
    Extrapolation { value: f64, min: f64, max: f64 },

    #[error("infeasible target for {element}: {target} outside [{min}, {max}]")]
    InfeasibleTarget {
        element: String,
        target: f64,
        min: f64,
        max: f64,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by malformed input rather than a numeric or
    /// physical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Size(_)
                | Error::Index { .. }
                | Error::InvalidArgument(_)
                | Error::Parse(_)
                | Error::Ordering { .. }
                | Error::TooFewSamples { .. }
                | Error::NonMonotone { .. }
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
