use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polyform has no lattice point in its interior")]
    EmptyDomain,
    #[error("invalid polyform: {0}")]
    InvalidPolyform(String),
    #[error("domain is not 4-connected")]
    Disconnected,
    #[error("domain is not convex")]
    NonConvex,
    #[error("polyform boundary has a hole or pinch point")]
    HoleDetected,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("configurations live on different domains")]
    DomainMismatch,
    #[error("negative chip count at vertex {0}")]
    NegativeInput(usize),
    #[error("chip count does not fit in 64 bits")]
    Overflow,
    #[error("box too small: {0}")]
    BoxTooSmall(String),
    #[error("function is not integer-valued")]
    NonInteger,
    #[error("function is not harmonic at {0:?}")]
    NonHarmonic((i64, i64)),
    #[error("divisibility violated at {0:?}")]
    Divisibility((i64, i64)),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
    #[error("integrality violated: {0}")]
    Integrality(String),
    #[error("no integer solution: {0}")]
    NoIntegerSolution(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
}
