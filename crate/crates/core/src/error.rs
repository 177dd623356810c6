use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input samples that cannot be processed (non-finite values, bad lengths).
    #[error("rejected input: {0}")]
    InvalidInput(String),

    /// A scalar parameter outside its admissible range.
    #[error("parameter `{name}` out of range: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Two grids that were expected to agree do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A configuration that cannot be realised on the requested grid.
    #[error("configuration error: {0}")]
    Config(String),

    /// Evaluation outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
