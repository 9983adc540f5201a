use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input; `field` names the offending location.
    #[error("{field}: {message}")]
    InvalidInput { field: String, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The instance is beyond the configured exhaustive bound and no answer
    /// was found before the search gave up. Distinct from a proven "no".
    #[error("size limit exceeded for {what}: {size} > {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn pre(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
