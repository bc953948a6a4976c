use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("target is constant, R² is undefined")]
    ConstantTarget,
    #[error("invalid hyperparameter {name} = {value}")]
    InvalidHyperparameter { name: String, value: String },
    #[error("unknown model family {0:?}")]
    UnknownFamily(String),
    #[error("cannot split {rows} rows into {folds} folds")]
    TooFewRows { rows: usize, folds: usize },
    #[error("{got} features exceed the exact Shapley cap of {max}; subsample features first")]
    TooManyFeatures { got: usize, max: usize },
    #[error("inconsistent row width: expected {expected}, found {found}")]
    RaggedRows { expected: usize, found: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
