use std::path::PathBuf;

use rabidress_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("report serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 2 for unreadable input, 3 for parameters outside the model's domain,
    /// 4 for truncation leakage, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Usage(_) => 2,
            Self::Core(CoreError::TruncationLeakage { .. }) => 4,
            Self::Core(CoreError::UnknownSelector(_)) => 2,
            Self::Core(_) => 3,
            Self::Validation(_) | Self::Io { .. } | Self::Csv(_) | Self::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
