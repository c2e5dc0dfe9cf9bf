use thiserror::Error;

/// Errors raised by the statistics, sampling and masking routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaskError {
    #[error("column is empty")]
    EmptyColumn,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("zero variance")]
    ZeroVariance,

    #[error("alpha {0} outside the admissible range")]
    AlphaOutOfRange(f64),

    #[error("computed noise variance {0} is negative")]
    NegativeNoiseVariance(f64),

    #[error("non-positive value {value} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },

    #[error("degenerate residual: {0}")]
    DegenerateResidual(String),

    #[error("requested zero deviates")]
    EmptyRequest,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = MaskError> = std::result::Result<T, E>;
