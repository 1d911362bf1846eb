use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid tile: {0}")]
    InvalidTile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("odd vertex count {0}: no perfect matching exists")]
    OddVertexCount(usize),

    #[error("lattice with {vertices} vertices exceeds the brute-force bound of {bound}")]
    SizeBoundExceeded { vertices: usize, bound: usize },

    #[error("tuple budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("cluster order {s} outside the supported range {min}..={max}")]
    OrderOutOfRange { s: usize, min: usize, max: usize },

    #[error("interpolation inconsistency: {0}")]
    Interpolation(String),

    #[error("series domain error: {0}")]
    SeriesDomain(String),

    #[error("fixed-point iteration did not converge within {rounds} rounds")]
    NonConvergence { rounds: usize },

    #[error("insufficient kernel orders: {0}")]
    InsufficientKernels(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}
