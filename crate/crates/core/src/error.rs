use std::path::PathBuf;

use crate::ids::ItemId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0} is empty")]
    Empty(String),
    #[error("no user has at least {min_ratings} ratings; lower the profile-size threshold")]
    EmptyAfterFilter { min_ratings: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("design matrix is rank deficient; collinear features: {}", .features.join(", "))]
    RankDeficient { features: Vec<String> },
    #[error("evaluating one-item selection {item}: {source}")]
    Selection {
        item: ItemId,
        #[source]
        source: Box<Error>,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Coarse error class, used by front ends to choose an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Internal,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Usage,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Empty(_)
            | Error::EmptyAfterFilter { .. }
            | Error::InsufficientData(_)
            | Error::RankDeficient { .. }
            | Error::Csv(_) => ErrorKind::Data,
            Error::Selection { source, .. } => source.kind(),
            Error::Json(_) => ErrorKind::Internal,
        }
    }
}
