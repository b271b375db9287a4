use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input broke a model constraint (bad probability, duplicate message, ...).
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// The score denominator `1 - q (1 - u)` vanished (`p = 0` and `u = 0`).
    #[error("degenerate score: p = 0 and u = 0 leave the score undefined")]
    DegenerateScore,

    #[error("message index {index} out of range for a catalog of {len} messages")]
    InvalidIndex { index: usize, len: usize },

    #[error("exhaustive search refused: {n} messages exceeds the guard of {max}")]
    SizeGuard { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("estimation failure: {0}")]
    EstimationFailure(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn constraint(msg: impl Into<String>) -> Self {
        Error::ConstraintViolation(msg.into())
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for errors caused by invalid configuration rather than a runtime fault.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
