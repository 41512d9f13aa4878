//! Spanning sets, subsystem spanning sets and entropy frontiers on a grid.

pub mod cover;
pub mod entropy;
pub mod frontier;
pub mod pool;
pub mod stay;
pub mod subsystem;

pub use cover::{min_cover, CoverInstance, CoverMode, CoverSolution};
pub use entropy::{
    concat_words, entropy_estimate, r_inv, r_inv_from_words, r_inv_on, r_inv_subsystem, verify_spanning,
    verify_subsystem, EntropyEstimate, SolveOptions, SpanningSolution,
};
pub use frontier::{
    concat_midpoint, frontier, neutral_control, pareto_filter, product_family_coverage, selector_pools,
    EntropyFrontier, FrontierOptions, FrontierPoint, PoolSearch,
};
pub use pool::{CandidatePool, DEFAULT_POOL_CAP};
pub use stay::{pool_coverage, stay_set};
pub use subsystem::SubsystemAbstraction;
