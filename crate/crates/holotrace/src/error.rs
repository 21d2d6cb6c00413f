use std::path::PathBuf;

/// Everything a command can fail with. [`AppError::exit_code`] maps it to the process status.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] holotrace_core::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("cannot write manifest: {0}")]
    Json(#[from] serde_json::Error),
}

impl AppError {
    /// 2 for bad input or configuration, 3 for numerically degenerate problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Parse { .. } | AppError::Read { .. } | AppError::Config(_) => 2,
            AppError::Core(e) if e.is_numerical() => 3,
            AppError::Core(_) => 2,
            AppError::Io(_) | AppError::Csv(_) | AppError::Json(_) => 1,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
