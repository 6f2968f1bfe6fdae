use std::path::PathBuf;

/// Errors produced across ingestion, graph construction and clustering.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A header or text file is missing a field or has a garbled one.
    #[error("format error: {0}")]
    Format(String),

    /// A token could not be parsed as a number.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    /// Declared and actual element counts disagree.
    #[error("size error: {0}")]
    Size(String),

    /// Non-finite or otherwise invalid data values.
    #[error("data error: {0}")]
    Data(String),

    /// A numeric parameter is out of its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The caller combined inputs that do not fit together.
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
