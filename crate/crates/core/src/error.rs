use std::path::PathBuf;

/// Errors produced anywhere in the solver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid material parameter: {0}")]
    InvalidMaterial(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported FFT size {size} (must be a power of two >= 2)")]
    UnsupportedSize { size: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("displacement {d} out of range for axis with {n} cells")]
    DisplacementOutOfRange { d: isize, n: usize },

    #[error("problem too large for brute-force evaluation: {size} > cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("non-finite magnetization after step {step}; the time step is probably too large")]
    NonFinite { step: u64 },

    #[error("empty field")]
    EmptyField,

    #[error("config line {line} ({key}): {message}")]
    ConfigLine {
        line: usize,
        key: String,
        message: String,
    },

    #[error("config: missing required key {key}")]
    ConfigMissing { key: String },

    #[error("field dump {path}: {message}")]
    Dump { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(expected: impl std::fmt::Debug, actual: impl std::fmt::Debug) -> Error {
    Error::DimensionMismatch {
        expected: format!("{expected:?}"),
        actual: format!("{actual:?}"),
    }
}
