use std::path::Path;

use knotfield_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Gate(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 0 success, 1 gate failure, 2 usage or configuration, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Gate(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                CoreError::Io(_) => 3,
                CoreError::RouteDisagreement { .. } | CoreError::Instability { .. } | CoreError::Integration(_) => 1,
                _ => 2,
            },
        }
    }
}
