use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("control index {index} out of range for an alphabet of size {size}")]
    ControlIndex { index: usize, size: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Some grid points admit no candidate word at all.
    #[error(
        "grid not controlled invariant at this resolution/margin: \
         {} of {total} grid points are covered by no candidate word",
        .uncovered.len()
    )]
    NotInvariant { uncovered: Vec<usize>, total: usize },

    #[error("set cover instance infeasible: {} elements are in no candidate set", .uncovered.len())]
    Infeasible { uncovered: Vec<usize> },

    #[error("branch-and-bound node limit of {limit} reached before optimality was proven")]
    SearchLimit { limit: u64 },

    #[error("linear algebra: {0}")]
    Linear(String),

    #[error("pair is not controllable: controllability matrix has rank {rank} < {dim}")]
    Uncontrollable { rank: usize, dim: usize },

    #[error("graph has {vertices} vertices; exact independence search is capped at {cap}, use the bound mode")]
    GraphTooLarge { vertices: usize, cap: usize },

    #[error("requested {requested} codewords at block length {block_len}, but at most {available} are available")]
    CodebookTooLarge { requested: usize, available: usize, block_len: usize },

    #[error("channel capacity insufficient at block length {block_len}: need {required} distinguishable words, have {available}")]
    CapacityInsufficient { required: usize, available: usize, block_len: usize },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
