use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("invalid fuzzifier m = {0}: must be finite and > 1")]
    InvalidFuzzifier(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("prototype bank layer {layer} is not initialized; bootstrap it from K-Means warm-start centroids first")]
    BankUninitialized { layer: usize },

    #[error("prototype bank layer {layer} is already initialized")]
    BankAlreadyInitialized { layer: usize },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("probability mass sums to {sum}, expected 1 within 1e-9")]
    Normalization { sum: f64 },

    #[error("gap scores are all identical; two-means thresholding is undefined")]
    DegenerateGaps,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(
        context: &'static str,
        expected: impl std::fmt::Display,
        actual: impl std::fmt::Display,
    ) -> Self {
        Error::Shape {
            context,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    /// Process exit code: 1 for configuration/usage problems, 2 for data and format problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidFuzzifier(_)
            | Error::InvalidConfig(_)
            | Error::BankUninitialized { .. }
            | Error::BankAlreadyInitialized { .. } => 1,
            _ => 2,
        }
    }
}
