use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis mismatch between operands")]
    BasisMismatch,

    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("matrix is not in sp(n,R): defect {defect:e}")]
    NotSymplectic { defect: f64 },

    #[error("tensor is not totally symmetric: defect {defect:e}")]
    NotSymmetric { defect: f64 },

    #[error("mode {mode:?} exceeds cutoff {cutoff}")]
    CutoffExceeded { mode: Vec<i32>, cutoff: i32 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("assembled {name} is not Hermitian: residual {residual:e}")]
    NotHermitian { name: String, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
