use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Path data that violates a structural invariant (ordering, length, finiteness).
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Argument outside the domain where a closed form is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The quantity depends on the path outside the simulated window.
    #[error("window contamination: {0}")]
    Contaminated(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A quadrature or inversion did not reach its accuracy target.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
