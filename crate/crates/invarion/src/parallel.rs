//! Rayon-backed execution.

use invarion_core::exec::CoverageChunk;
use invarion_core::Executor;
use rayon::prelude::*;

/// Runs coverage jobs, and independent simulations, on a dedicated pool.
/// Results come back in job order whatever the thread count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `threads == 0` lets rayon pick.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        Ok(RayonExecutor { pool: rayon::ThreadPoolBuilder::new().num_threads(threads).build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Map `f` over `items` in parallel, keeping order.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

impl Executor for RayonExecutor {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> CoverageChunk + Sync)) -> Vec<CoverageChunk> {
        self.pool.install(|| (0..jobs).into_par_iter().map(job).collect())
    }
}
