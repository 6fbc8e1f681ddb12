use std::path::PathBuf;

use thiserror::Error;

use crate::model::{ExecutorId, RequesterId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid money amount {0:?}")]
    InvalidAmount(String),

    #[error("ballot {ballot} names unknown requester {requester}")]
    UnknownRequester { ballot: usize, requester: RequesterId },

    #[error("unknown executor {0}")]
    UnknownExecutor(ExecutorId),

    #[error("exhaustive knapsack search supports at most {limit} requesters, got {got}")]
    OracleTooLarge { limit: usize, got: usize },

    #[error("payment requested for an empty winner set")]
    NoWinners,

    #[error("a requester must own at least one task")]
    NoTasks,

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("{context}: {source}")]
    Stage {
        context: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, context: &'static str) -> Self {
        Error::Stage {
            context,
            source: Box::new(self),
        }
    }
}
