use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    PgmFormat { path: PathBuf, reason: String },

    #[error("manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("config {path}:{line}: {reason}")]
    Config {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("model file {path}: {reason}")]
    ModelFormat { path: PathBuf, reason: String },

    /// Violated precondition or out-of-range argument.
    #[error("{0}")]
    InvalidInput(String),

    /// Constant image: variance equalization has nothing to work with.
    #[error("degenerate contrast: image has zero standard deviation")]
    DegenerateContrast,

    /// All coefficients zero; no probability distribution exists.
    #[error("degenerate block: all coefficients are zero")]
    DegenerateBlock,

    #[error("kernel matrix is not positive semi-definite (eigenvalue {eigenvalue:e} below tolerance)")]
    NotPsd { eigenvalue: f64 },

    #[error("no eigen axis passes the selection filter")]
    NoUsableAxis,

    /// Wraps an error with the pipeline stage and the item being processed.
    #[error("{stage} [{item}]: {source}")]
    Stage {
        stage: &'static str,
        item: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Attach stage/item context while propagating.
    pub fn in_stage(self, stage: &'static str, item: impl Into<String>) -> Self {
        Error::Stage {
            stage,
            item: item.into(),
            source: Box::new(self),
        }
    }
}
