use thiserror::Error;

/// Errors produced by the qcpd core library.
#[derive(Debug, Error)]
pub enum QcpdError {
    #[error("unrecognized quality class label: {0:?}")]
    UnknownQualityClass(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series too short: need at least {need} rows, got {got}")]
    SeriesTooShort { need: usize, got: usize },

    #[error("xml parse error at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl QcpdError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        QcpdError::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, QcpdError>;
