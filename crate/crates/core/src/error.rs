use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("no codewords")]
    Empty,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("neuron subset of size {size} exceeds the limit of {limit}")]
    SubsetSize { size: usize, limit: usize },

    #[error("brute-force canonical form is capped at {limit} neurons (got {n})")]
    DimensionGuard { n: usize, limit: usize },

    #[error("{0} is not a simplex of the complex")]
    NotASimplex(String),

    #[error("numerical failure: {message} (condition number {condition:.3e})")]
    Numerical { message: String, condition: f64 },

    #[error("computation exceeded its time budget of {0:?}")]
    Timeout(std::time::Duration),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code for the error class: 2 input, 3 numerical, 4 config.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Format { .. }
            | Error::Empty
            | Error::InvalidInput(_)
            | Error::SubsetSize { .. }
            | Error::DimensionGuard { .. }
            | Error::NotASimplex(_)
            | Error::Io(_) => 2,
            Error::Numerical { .. } | Error::Timeout(_) => 3,
            Error::Config(_) => 4,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }

    /// Labels the error with the pipeline stage it came from.
    pub fn at(self, stage: &'static str) -> Error {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }
}
