use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("regressor matrix is rank deficient in column `{column}`")]
    RankDeficient { column: String },

    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("model `{0}` has not been fitted")]
    NotFitted(String),

    #[error("out of range: {0}")]
    OutOfRange(String),
}
