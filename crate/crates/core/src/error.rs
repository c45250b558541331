use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("non-degeneracy violated: {0}")]
    Degenerate(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("variance mismatch: {0}")]
    Variance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
