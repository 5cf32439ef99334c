use std::path::{Path, PathBuf};

use recmin::ErrorKind;

/// Failure of a command, carrying the exit status class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
    #[error("missing expected artifact {}: {hint}", .path.display())]
    MissingArtifact { path: PathBuf, hint: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::MissingArtifact { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }
}

impl From<recmin::Error> for CliError {
    fn from(e: recmin::Error) -> Self {
        match e.kind() {
            ErrorKind::Usage => CliError::Usage(e.to_string()),
            ErrorKind::Data => CliError::Data(e.to_string()),
            ErrorKind::Internal => CliError::Internal(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
