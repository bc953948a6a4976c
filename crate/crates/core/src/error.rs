use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{0}: no valid rows")]
    NoValidRows(PathBuf),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("empty vocabulary intersection")]
    EmptyIntersection,
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("unknown {kind} `{value}`")]
    UnknownVariant { kind: &'static str, value: String },
    #[error("graph has no edges")]
    NoEdges,
    #[error("empty structure: {0}")]
    Empty(&'static str),
    #[error("missing attribute for node `{0}`")]
    MissingAttribute(String),
    #[error("too few contexts: need at least {need}, got {got}")]
    TooFewContexts { need: usize, got: usize },
    #[error("linear program failed: {0}")]
    LinearProgram(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
