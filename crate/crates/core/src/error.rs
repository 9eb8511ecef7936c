use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("subsystem `{0}` appears more than once")]
    DuplicateSubsystem(String),
    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),
    #[error("subsystem `{0}` has zero dimension")]
    ZeroDimension(String),
    #[error("register mismatch: {0}")]
    RegisterMismatch(String),
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("function is singular at retained eigenvalue {0:e}")]
    SingularFunction(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid purification: {0}")]
    InvalidPurification(String),
    #[error("reference of the source purification ({source_dim}) exceeds the target reference ({target_dim})")]
    ReferenceTooLarge { source_dim: usize, target_dim: usize },
    #[error("invalid divergence order alpha = {0}")]
    BadOrder(f64),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("operator outside the admissible range: {0}")]
    BadOperatorRange(String),
    #[error("invalid code parameters: {0}")]
    BadCodeParams(String),
    #[error("construction too large: dimension {dim} exceeds limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
