use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Mass reached the truncated far end of an edge (or the boundary of a line domain);
    /// the finite grid no longer emulates a half-line.
    #[error("domain truncation violated at t = {time}: far-end mass {mass:.3e} exceeds {threshold:.3e}")]
    DomainTruncationViolation { time: f64, mass: f64, threshold: f64 },

    #[error("checkpoint {path}: unsupported format version {found} (expected {expected})")]
    CheckpointVersion { path: PathBuf, found: u32, expected: u32 },

    #[error("checkpoint {path}: corrupt header: {reason}")]
    CheckpointCorrupt { path: PathBuf, reason: String },

    #[error("checkpoint {path}: shape mismatch: {reason}")]
    CheckpointShape { path: PathBuf, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Stable numeric code, used as the process exit status by the CLI.
    pub fn code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::NumericFailure(_) => 3,
            Error::DomainTruncationViolation { .. } => 4,
            Error::CheckpointVersion { .. } => 10,
            Error::CheckpointCorrupt { .. } => 11,
            Error::CheckpointShape { .. } => 12,
            Error::Config(_) => 5,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
