use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed dump {path}: {reason}")]
    MalformedDump { path: PathBuf, reason: String },

    #[error("malformed graph file: {0}")]
    MalformedGraph(String),

    #[error("malformed matrix file: {0}")]
    MalformedMatrix(String),

    #[error("graph has no positive-capacity membership")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} did not converge within {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("column {node} has no off-diagonal mass")]
    DiagonalOnlyColumn { node: String },

    #[error("subset mismatch: {0}")]
    SubsetMismatch(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
