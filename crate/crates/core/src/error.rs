use thiserror::Error;

/// Errors produced by the numerical operations of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Dimension(_) => "dimension",
            Error::Size(_) => "size",
            Error::Resolution(_) => "resolution",
            Error::Unsupported(_) => "unsupported",
            Error::Accuracy(_) => "accuracy",
            Error::Invariant(_) => "invariant",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Budget and resolution failures are distinguished from bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Size(_) | Error::Resolution(_) | Error::Accuracy(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
