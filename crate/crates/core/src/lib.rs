//! Invariance entropy of networked control systems on grid abstractions.
//!
//! The crate computes minimal spanning sets of control words for a target
//! set `Q` sampled on a grid, the subsystem variants in which only one
//! component's words are counted, and finite-time network entropy
//! frontiers. It also carries the linear-system closed forms (unstable
//! eigenvalue sums, Brunovsky reduction), zero-error capacity bounds for
//! nondeterministic channels, and a block-coding closed-loop simulator.
//!
//! Everything here is `no_std` with `alloc`. File formats, configuration
//! and the command-line driver live in the `invarion` crate.
//!
//! Logarithms are base 2 throughout, so rates are in bits per time step.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod bitset;
pub mod channel;
pub mod closed_loop;
mod error;
pub mod exec;
pub mod linear;
pub mod region;
pub mod span;
pub mod system;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use region::{GridElements, GridRegion, Predicate, Shape};
pub use system::{ControlWord, Matrix, SystemDef, SystemKind};
