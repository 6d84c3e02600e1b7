use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("unknown builtin operator `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid builtin parameters: {0}")]
    InvalidBuiltin(String),
    #[error("frequency must be nonzero")]
    ZeroFrequency,
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("size budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("operator is not elliptic: {0}")]
    NotElliptic(String),
    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("sample too small: need at least {needed} points, got {got}")]
    SampleTooSmall { needed: usize, got: usize },
    #[error("invalid exponent query: {0}")]
    InvalidLadder(String),
    #[error("exponent {p} outside the admissible window {window} for d={d}, k={k}")]
    ExponentOutOfRange { p: String, d: u32, k: u32, window: String },
    #[error("cannot parse rational `{0}`")]
    ParseRational(String),
}
