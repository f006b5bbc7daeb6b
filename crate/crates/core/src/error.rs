use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CzError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resolution error: dyadic generation {gen} exceeds grid depth {depth}")]
    Resolution { gen: u32, depth: u32 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CzError>;

impl From<std::io::Error> for CzError {
    fn from(e: std::io::Error) -> Self {
        CzError::Io(e.to_string())
    }
}

impl From<csv::Error> for CzError {
    fn from(e: csv::Error) -> Self {
        CzError::Io(e.to_string())
    }
}
