use std::path::Path;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error(transparent)]
    Numeric(#[from] blaschke_lab::Error),

    #[error("i/o failure on {path}: {message}")]
    IoFailure { path: String, message: String },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::ConfigInvalid(message.into())
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::IoFailure {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// Process exit code: 2 config, 3 numeric, 4 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::IoFailure { .. } => 4,
        }
    }
}
