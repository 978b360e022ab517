use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid sparse matrix: {0}")]
    InvalidMatrix(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    Singular { column: usize, pivot: f64 },

    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("node {0} has zero degree")]
    IsolatedNode(usize),

    #[error("connected component containing node {0} has no sampled node")]
    UnsampledComponent(usize),

    #[error("invalid sampling set: {0}")]
    InvalidSampling(String),

    #[error("nothing to interpolate: every node is sampled")]
    EmptyComplement,

    #[error("conjugate gradient broke down: system is not positive definite")]
    Breakdown,

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("malformed image data: {0}")]
    Format(String),

    #[error("unsupported image format: {0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
