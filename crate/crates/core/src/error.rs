use thiserror::Error;

/// Errors produced by the library. The CLI maps each variant to a stable exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate start: weight polynomial vanishes at the starting weighting")]
    DegenerateStart,

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("enumeration budget of {budget} graphs exceeded after {examined} graphs (best lambda so far {best_lambda:.17e})")]
    BudgetExceeded {
        budget: u64,
        examined: u64,
        best_lambda: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
