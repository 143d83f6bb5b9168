use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is singular: pivot magnitude {pivot:e} below threshold {threshold:e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("dimension {dim} exceeds the oracle limit {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("root finder did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
        max_residual: f64,
    },

    #[error(
        "Jordan structure mismatch: expected kernel dimensions {expected:?}, detected {detected:?}"
    )]
    StructureMismatch {
        expected: Vec<usize>,
        detected: Vec<usize>,
    },

    #[error("eigenvalue {eta} is not the only eigenvalue: kernel dimensions {detected:?}")]
    NotSingleEigenvalue { eta: String, detected: Vec<usize> },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("metric is not Hermitian positive-definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Input-side failures (bad arguments, files, shapes) as opposed to
    /// numerical breakdowns.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::TooLarge { .. }
                | Error::InvalidInput(_)
                | Error::NonFinite(_)
                | Error::Json(_)
                | Error::Io(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
