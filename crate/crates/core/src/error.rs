use thiserror::Error;

/// Errors raised while constructing or manipulating the algebras.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported characteristic {0}: p must be an odd prime")]
    UnsupportedCharacteristic(u32),

    #[error("unsupported rank n = {0}: n must be at least 2")]
    UnsupportedRank(usize),

    #[error("invalid truncation vector: {0}")]
    InvalidTruncation(String),

    #[error("algebra too large: {0} basis monomials")]
    ContextTooLarge(u128),

    #[error("inversion of zero")]
    ZeroInverse,

    #[error("invalid binomial: bottom {bottom:?} is not componentwise below top {top:?}")]
    InvalidBinomial { top: Vec<u32>, bottom: Vec<u32> },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operands belong to different algebra contexts")]
    ContextMismatch,

    #[error("monomial outside the truncated algebra: {0}")]
    InvalidMonomial(String),

    #[error("direction index {index} out of range 1..={max}")]
    DirectionOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },

    #[error("not a subalgebra: bracket of basis vectors {0} and {1} leaves the subspace")]
    NotSubalgebra(usize, usize),

    #[error("weight decomposition failed: {0}")]
    WeightDecomposition(String),

    #[error("{mode} solve infeasible: {unknowns} unknowns exceeds the limit of {limit}")]
    Infeasible {
        mode: &'static str,
        unknowns: usize,
        limit: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
