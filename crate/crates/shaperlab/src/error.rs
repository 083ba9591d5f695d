use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] shaperlab_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed header at line {line}: {message}")]
    MalformedHeader { line: usize, message: String },

    #[error("line {line}: non-numeric cell {cell:?} in column {column}")]
    NonNumeric {
        line: usize,
        column: &'static str,
        cell: String,
    },

    #[error("line {line}: expected two columns (time_s,displacement_mm)")]
    BadRow { line: usize },

    #[error("line {line}: nonuniform timestamps (expected {expected}, found {found})")]
    NonuniformTimestamps {
        line: usize,
        expected: f64,
        found: f64,
    },

    #[error("dataset has no data rows")]
    EmptyBody,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Core(e) if e.is_divergence())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
