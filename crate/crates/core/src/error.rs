use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for alphabet of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// A precondition of an operation was not met by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The requested computation is not available for this input,
    /// e.g. distortion utility on a categorical alphabet.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Ingest(#[from] IngestError),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("column {column} not found")]
    MissingColumn { column: String },

    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },

    #[error("row {row}: value {value:?} in column {column} is not numeric")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("no usable records after filtering missing values")]
    Empty,
}
