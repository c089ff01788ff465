use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coefficient overflow at index {index} ({context})")]
    Overflow { index: usize, context: String },

    /// Integer overflow outside of a coefficient buffer (moduli, search steps, products).
    #[error("arithmetic overflow: {0}")]
    ArithmeticOverflow(String),

    #[error("resource limit exceeded: {what} needs {needed}, budget is {budget}")]
    Resource {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("search exhausted during {stage}: no prime found up to cap {cap}")]
    NotFound { stage: String, cap: u64 },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Re-labels a search failure with the construction stage that issued it.
    pub(crate) fn at_stage(self, stage: &str) -> Self {
        match self {
            Error::NotFound { cap, .. } => Error::NotFound {
                stage: stage.to_string(),
                cap,
            },
            other => other,
        }
    }
}
