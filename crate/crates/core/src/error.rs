use thiserror::Error;

/// Errors raised by the recovery pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violated a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error("non-physical amplitude |z| = {0}")]
    NonPhysicalAmplitude(f64),
    #[error("oversampled: requested {requested} samples from {available} grid points")]
    Oversampled { requested: usize, available: usize },
    #[error("already extended")]
    AlreadyExtended,
    #[error("signal too short for subspace method (length {0}, need at least 3)")]
    SignalTooShort(usize),
    #[error("signal too short for requested model order: {rows} Hankel rows, model order {order}")]
    ModelOrderTooLarge { rows: usize, order: usize },
    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("solver diverged at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors caused by bad user input (as opposed to numerical failure).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Diverged { .. } | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
