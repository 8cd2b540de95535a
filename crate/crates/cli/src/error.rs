use std::path::PathBuf;

use monoform_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),

    #[error("config {}: {msg}", path.display())]
    Config { path: PathBuf, msg: String },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Domain(_)) | CliError::Usage(_) => 2,
            CliError::Core(Error::MalformedMesh(_)) | CliError::Config { .. } => 5,
            CliError::Core(_) => 3,
            CliError::Io { .. } | CliError::Output(_) => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
