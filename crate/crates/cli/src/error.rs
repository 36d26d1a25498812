use std::path::PathBuf;

use floquet_qa::Error as ModelError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{context}: {source}")]
    AtPoint { context: String, source: ModelError },
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn at(context: impl Into<String>, source: ModelError) -> Self {
        AppError::AtPoint { context: context.into(), source }
    }

    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Model(e) | AppError::AtPoint { source: e, .. } => match e {
                ModelError::InvalidParameter(_) => 2,
                _ => 3,
            },
            _ => 2,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
