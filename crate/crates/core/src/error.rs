use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("expected a {expected} domain frame")]
    DomainMismatch { expected: &'static str },
    #[error("block index discontinuity: previous {previous}, next {next}")]
    BlockDiscontinuity { previous: usize, next: usize },
    #[error("cyclic prefix of {actual} samples is shorter than the required {required}")]
    CyclicPrefixTooShort { required: usize, actual: usize },
    #[error("symbol {index} is not a point of its slot constellation")]
    SymbolNotInConstellation { index: usize },
    #[error("power and noise parameters must be positive")]
    NonPositivePower,
    #[error("operation requires the 2x2 orthogonal design")]
    NotOrthogonalDesign,
}
