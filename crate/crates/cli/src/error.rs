use std::path::PathBuf;

use pcmlab::PcmError;
use thiserror::Error;

/// Process exit codes. Stable contract.
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] PcmError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("cannot serialize manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Validation(_) => EXIT_VALIDATION,
            _ => EXIT_INPUT,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
