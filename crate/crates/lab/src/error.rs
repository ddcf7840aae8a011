use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] csflow_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("{}: malformed artifact: {message}", path.display())]
    Malformed { path: PathBuf, message: String },
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for usage and input errors, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) | LabError::Usage(_) | LabError::Malformed { .. } => 2,
            LabError::Core(csflow_core::Error::Io(_)) => 3,
            LabError::Core(_) => 2,
            LabError::Io { .. } | LabError::MissingArtifact(_) => 3,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
