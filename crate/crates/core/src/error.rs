use thiserror::Error;

/// Errors raised by measure construction, evaluation and file ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rate at index {index} is {value}; rates must be finite and > 0")]
    InvalidRate { index: usize, value: f64 },

    #[error("mass at index {index} is {value}; masses must be finite and > 0")]
    InvalidMass { index: usize, value: f64 },

    #[error("masses sum to {sum}, expected 1")]
    MassSum { sum: f64 },

    #[error("measure has no atoms")]
    EmptyMeasure,

    #[error("tuple dimension must be >= 1")]
    ZeroDimension,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension {n} exceeds the brute-force limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("family generation failed for n = {n}: {source}")]
    Family {
        n: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
