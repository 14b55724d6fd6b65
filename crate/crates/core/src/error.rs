use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integral that does not converge was requested.
    #[error("non-integrable singularity: {0}")]
    Singular(String),

    /// Cholesky met a non-positive pivot.
    #[error("operator is not positive definite (pivot {pivot} = {value:e})")]
    Indefinite { pivot: usize, value: f64 },

    /// An iteration ran out of budget. `best` carries the last accepted
    /// iterate when the caller may want to inspect it.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        best: Option<Vec<f64>>,
    },

    /// A sign-changing iterate lost one of its signed parts.
    #[error("sign change lost: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
