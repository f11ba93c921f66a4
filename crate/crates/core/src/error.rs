use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("node id {id} out of range for a graph with {n} nodes")]
    IdOutOfRange { id: u64, n: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("memory budget of {budget} edges cannot hold a partition of {needed} edges")]
    BudgetTooSmall { budget: u64, needed: u64 },

    #[error("sketch full: {capacity} edge slots in use")]
    CapacityOverflow { capacity: usize },

    #[error("watchdog exceeded after {passes} passes")]
    Watchdog { passes: u64 },

    #[error("time limit of {seconds}s exceeded")]
    Timeout { seconds: u64 },

    #[error("inconsistent state: {0}")]
    Inconsistent(String),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("graph too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
