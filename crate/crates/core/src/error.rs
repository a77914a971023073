use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("parameter is not elliptic: {0}")]
    NotElliptic(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("group rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: u32, got: u32 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("enumeration guard exceeded: {size} > {cap}")]
    GuardExceeded { size: u64, cap: u64 },
    #[error("negative trace value {0}")]
    NegativeTrace(String),
    #[error("malformed inner form: {0}")]
    MalformedInnerForm(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
