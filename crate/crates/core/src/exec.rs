//! Pluggable execution of independent jobs.
//!
//! The core crate has no threads. Callers that do (the CLI uses rayon) can
//! hand an [`Executor`] to the coverage builders; results are always
//! collected in job order, so the outcome does not depend on the worker
//! count.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::BitSet;

/// Output of one coverage job: `(candidate index, coverage)` pairs for the
/// candidates whose coverage is nonempty.
pub type CoverageChunk = Vec<(u32, BitSet)>;

pub trait Executor: Sync {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> CoverageChunk + Sync)) -> Vec<CoverageChunk>;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sequential;

impl Executor for Sequential {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> CoverageChunk + Sync)) -> Vec<CoverageChunk> {
        (0..jobs).map(job).collect()
    }
}

impl<E: Executor + ?Sized> Executor for Box<E> {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> CoverageChunk + Sync)) -> Vec<CoverageChunk> {
        (**self).run(jobs, job)
    }
}
