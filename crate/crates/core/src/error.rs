use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("nilpotency step {step} exceeds the supported BCH truncation depth {max}")]
    UnsupportedStep { step: usize, max: usize },

    #[error("closed form requires step <= {max}, algebra has step {step}; use the finite-difference variant")]
    ClosedFormUnavailable { step: usize, max: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cost guard: {what} needs {required} entries, limit is {limit}")]
    CostGuard {
        what: String,
        required: f64,
        limit: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
