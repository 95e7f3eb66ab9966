use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Param(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("coefficient domain mismatch")]
    DomainMismatch,

    #[error("coefficient {value} at index {index} does not fit in {bits} bits")]
    CoefficientOverflow { index: usize, bits: u32, value: String },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("scale mismatch: {left} vs {right}")]
    ScaleMismatch { left: f64, right: f64 },

    #[error("key error: {0}")]
    Key(String),

    #[error("capacity exceeded: need {need} positions, have {have}")]
    Capacity { need: usize, have: usize },

    #[error("no truncation degree found within {cap} terms")]
    Convergence { cap: usize },

    #[error("BCH decoding failed in block {block}")]
    DecodeFailure { block: usize },

    #[error("malformed artifact: {0}")]
    Format(String),

    #[error("parameter digest mismatch")]
    DigestMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DecodeFailure { .. } => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }
}
