use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a dominant weight: {0:?}")]
    NotDominant(Vec<i64>),

    #[error("polynomial is not invariant under the hyperoctahedral group")]
    NotInvariant,

    #[error("exact division left a nonzero remainder")]
    NotDivisible,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("parameter domain violated: {0}")]
    Domain(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("singular Gram submatrix for weight {weight}: leading minor of order {minor} vanishes (truncation order too small or inadmissible parameters)")]
    Degenerate { weight: String, minor: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid value for `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
