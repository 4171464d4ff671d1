use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation library and the experiment driver.
#[derive(Debug, Error)]
pub enum KdnlsError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("grid mismatch: expected K={expected_k}, M={expected_m}; got K={got_k}, M={got_m}")]
    GridMismatch {
        expected_k: usize,
        expected_m: usize,
        got_k: usize,
        got_m: usize,
    },

    #[error("sample length {got} does not match the physical grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-dissipative coefficient beta = {0}; only allowed in experiment mode")]
    NonDissipative(f64),

    #[error("integration failure at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("undefined quantity: {0}")]
    Undefined(String),

    #[error("root solve failed: {0}")]
    RootSolve(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T, E = KdnlsError> = std::result::Result<T, E>;

impl KdnlsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        KdnlsError::Io {
            path: path.into(),
            source,
        }
    }
}
