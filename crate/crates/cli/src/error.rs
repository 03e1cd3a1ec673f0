use std::path::PathBuf;

use thiserror::Error;

/// Failure of a CLI run; each variant has its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("invalid config: {0}")]
    Schema(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numeric failure: {0}")]
    Numeric(#[from] kaonsim_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingFile(_) => 2,
            CliError::Schema(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Numeric(_) => 5,
        }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn numeric(e: impl Into<kaonsim_core::Error>) -> Self {
        CliError::Numeric(e.into())
    }
}
