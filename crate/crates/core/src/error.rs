//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count {n} out of range (1..={max})", max = crate::subset::MAX_VARS)]
    VariableCount { n: usize },

    #[error("mask {mask:#b} invalid for n={n}")]
    InvalidMask { mask: u32, n: usize },

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("table length {got} does not equal 2^{n}")]
    TableLength { n: usize, got: usize },

    #[error("evaluator returned non-finite value at mask {mask:#b}")]
    NonFiniteValue { mask: u32 },

    #[error("non-finite evaluation for sample {sample}, trial {trial}")]
    NonFiniteTrial { sample: usize, trial: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("category {0:?} present on only one side")]
    CategoryMismatch(String),

    #[error("degenerate denominator: {0}")]
    Degenerate(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    #[error("evaluator protocol: {0}")]
    Protocol(String),

    #[error("evaluator returned non-finite value for request id {id}")]
    ProtocolNonFinite { id: u64 },

    #[error("evaluator timed out after {0:?}")]
    ProtocolTimeout(std::time::Duration),

    #[error("table file {path}: {msg}")]
    TableFormat { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit-code bucket used by the CLI: 2 input/usage, 3 evaluator protocol,
    /// 4 numeric degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Protocol(_)
            | Error::ProtocolNonFinite { .. }
            | Error::ProtocolTimeout(_)
            | Error::NonFiniteValue { .. }
            | Error::NonFiniteTrial { .. } => 3,
            Error::Degenerate(_) => 4,
            _ => 2,
        }
    }
}
