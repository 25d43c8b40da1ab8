use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The computation would exceed a memory or size limit.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A search or verification budget was exhausted.
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// `true` for errors caused by limits rather than by bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::Budget(_))
    }
}
