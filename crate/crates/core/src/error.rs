use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configured size guard refused to run a computation.
    #[error("{what}: estimated size {estimate:.3e} exceeds limit {limit:.3e}; {hint}")]
    Guard {
        what: String,
        estimate: f64,
        limit: f64,
        hint: String,
    },

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn guard(what: impl Into<String>, estimate: f64, limit: f64, hint: impl Into<String>) -> Self {
        Error::Guard {
            what: what.into(),
            estimate,
            limit,
            hint: hint.into(),
        }
    }

    /// True for errors caused by size guards rather than malformed input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. } | Error::TooLarge(_))
    }
}
