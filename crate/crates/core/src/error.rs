use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix {block} is numerically singular (condition number {condition:.3e})")]
    Singular { block: &'static str, condition: f64 },

    #[error("channel is identically zero; no precoder can be formed")]
    DegenerateChannel,

    #[error("cached inverse G is stale: loads changed since it was computed")]
    StaleInverse,

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
