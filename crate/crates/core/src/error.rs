use thiserror::Error;

/// Errors raised by the game, optimizer and certification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not a unit-square qubit observable: {0}")]
    NotObservable(String),
    #[error("state vector has zero norm")]
    ZeroState,
    #[error("number of inputs must be odd and at least 3, got {0}")]
    InvalidInputCount(usize),
    #[error("number of inputs {n} outside supported range {min}..={max}")]
    InputsOutOfRange { n: usize, min: usize, max: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("operator {0} has vanishing norm on the state")]
    VanishingNorm(String),
    #[error("observable family violates the parity condition (deviation {0:.3e})")]
    ParityViolated(f64),
    #[error("inconsistent statistics: {0}")]
    InconsistentStatistics(String),
    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
