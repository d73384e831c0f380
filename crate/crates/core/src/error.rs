use thiserror::Error;

/// Errors raised by state construction, evolution and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: every mode needs at least 2 levels")]
    InvalidDimension { dim: usize },

    #[error("level {n} out of range for a mode of dimension {dim}")]
    OutOfRange { n: usize, dim: usize },

    #[error("truncation too small: dimension {dim} < required {required} ({what})")]
    TruncationTooSmall {
        dim: usize,
        required: usize,
        what: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("norm leakage {leakage:e} exceeds limit {limit:e}")]
    NormLeakage { leakage: f64, limit: f64 },

    #[error("unsupported perturbative order {0} (expected 1 or 2)")]
    UnsupportedOrder(usize),

    #[error("state is not single-mode (dims {dims:?}); reduce it to one mode first")]
    NotSingleMode { dims: Vec<usize> },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension { .. } => "invalid-dimension",
            Error::OutOfRange { .. } => "out-of-range",
            Error::TruncationTooSmall { .. } => "truncation-too-small",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::ShapeMismatch { .. } => "shape-mismatch",
            Error::NormLeakage { .. } => "norm-leakage",
            Error::UnsupportedOrder(_) => "unsupported-order",
            Error::NotSingleMode { .. } => "not-single-mode",
            Error::Config { .. } => "config",
        }
    }

    /// Process exit status for this error: 2 for config problems, 4 for
    /// truncation leakage, 3 for every other guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::NormLeakage { .. } => 4,
            _ => 3,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
