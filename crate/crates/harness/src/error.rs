use std::path::PathBuf;

use cojump::CojumpError;
use thiserror::Error;

use crate::ingest::IngestError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Ingest(#[from] IngestError),

    #[error(transparent)]
    Stats(#[from] CojumpError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// 1 for configuration problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Stats(e) => match e {
                CojumpError::InvalidParameter(_)
                | CojumpError::InsufficientDraws { .. }
                | CojumpError::MissingPowerGuard
                | CojumpError::DegenerateConfig(_) => 1,
                _ => 2,
            },
            HarnessError::Ingest(_) | HarnessError::Io { .. } | HarnessError::Csv(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
