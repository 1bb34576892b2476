use thiserror::Error;

/// Errors across the library. Input-shaped problems (`InvalidArgument`,
/// `ShapeMismatch`, `Parse`, `Validation`) are distinguished from runtime
/// failures so callers can map them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("training diverged at iteration {iteration}: loss is not finite")]
    TrainingDiverged { iteration: usize },
    #[error("degenerate fit: {0}")]
    FitDegenerate(String),
    #[error("series is not mean-reverting: AR(1) coefficient {ar_coeff} >= 1")]
    NonMeanReverting { ar_coeff: f64 },
    #[error("spread construction failed: {0}")]
    ConstructionFailed(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error stems from bad input rather than a runtime
    /// failure (used for CLI exit-code mapping).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::ShapeMismatch(_)
                | Error::Parse { .. }
                | Error::Validation(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
