//! Which grid elements a control word keeps inside `Q`.

use alloc::vec;
use alloc::vec::Vec;

use super::pool::CandidatePool;
use crate::exec::{CoverageChunk, Executor};
use crate::region::GridElements;
use crate::{BitSet, ControlWord, GridRegion, SystemDef};

/// Words per coverage job.
const CHUNK: usize = 2048;

/// Bit `x` is set iff `φ(k, x, ω)` passes the margin interior test for
/// every `k = 1..τ`.
pub fn stay_set(system: &SystemDef, region: &GridRegion, elements: &GridElements, word: &ControlWord) -> BitSet {
    stay_set_masked(system, region, elements, word, &BitSet::full(elements.len()))
}

/// [`stay_set`] evaluated only on the elements in `mask`.
pub fn stay_set_masked(
    system: &SystemDef,
    region: &GridRegion,
    elements: &GridElements,
    word: &ControlWord,
    mask: &BitSet,
) -> BitSet {
    let d = system.state_dim();
    let mut out = BitSet::new(elements.len());
    let mut cur = vec![0.0; d];
    let mut next = vec![0.0; d];
    'elements: for i in mask.iter() {
        cur.copy_from_slice(elements.point(i));
        for &u in &word.entries {
            system.step_into(&cur, u as usize, &mut next);
            if !region.in_interior(&next) {
                continue 'elements;
            }
            core::mem::swap(&mut cur, &mut next);
        }
        out.insert(i);
    }
    out
}

/// Nonempty stay sets of every pool word, as `(pool index, set)` in pool
/// order.
///
/// Words sharing a prefix share the work on that prefix: the pool is
/// sorted, so a depth-first walk over common prefixes advances the states
/// of the still-alive elements once per trie node.
pub fn pool_coverage(
    system: &SystemDef,
    region: &GridRegion,
    elements: &GridElements,
    pool: &CandidatePool,
    exec: &dyn Executor,
) -> Vec<(u32, BitSet)> {
    let jobs = pool.len().div_ceil(CHUNK);
    let run = |job: usize| -> CoverageChunk {
        let lo = job * CHUNK;
        let hi = (lo + CHUNK).min(pool.len());
        let mut walker = Walker { system, region, pool, n: elements.len(), out: Vec::new() };
        let alive: Vec<usize> = (0..elements.len()).collect();
        let states: Vec<f64> = elements.points().flatten().copied().collect();
        walker.descend(0, lo, hi, &alive, &states);
        walker.out
    };
    exec.run(jobs, &run).into_iter().flatten().collect()
}

struct Walker<'a> {
    system: &'a SystemDef,
    region: &'a GridRegion,
    pool: &'a CandidatePool,
    n: usize,
    out: CoverageChunk,
}

impl Walker<'_> {
    fn descend(&mut self, depth: usize, lo: usize, hi: usize, alive: &[usize], states: &[f64]) {
        if depth == self.pool.tau() {
            // pool words are distinct, so the range holds exactly one word
            debug_assert_eq!(hi - lo, 1);
            self.out.push((lo as u32, BitSet::from_indices(self.n, alive.iter().copied())));
            return;
        }
        let d = self.system.state_dim();
        let mut buf = vec![0.0; d];
        let mut start = lo;
        while start < hi {
            let u = self.pool.entries(start)[depth];
            let mut end = start + 1;
            while end < hi && self.pool.entries(end)[depth] == u {
                end += 1;
            }
            let mut next_alive = Vec::with_capacity(alive.len());
            let mut next_states = Vec::with_capacity(states.len());
            for (k, &e) in alive.iter().enumerate() {
                self.system.step_into(&states[k * d..(k + 1) * d], u as usize, &mut buf);
                if self.region.in_interior(&buf) {
                    next_alive.push(e);
                    next_states.extend_from_slice(&buf);
                }
            }
            if !next_alive.is_empty() {
                self.descend(depth + 1, start, end, &next_alive, &next_states);
            }
            start = end;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::uniform_levels;
    use crate::{Matrix, Sequential};

    fn scalar(a: f64, levels: usize) -> SystemDef {
        SystemDef::linear(Matrix::from_element(1, 1, a), Matrix::from_element(1, 1, 1.0), uniform_levels(-1.0, 1.0, levels))
            .unwrap()
    }

    #[test]
    fn zero_map_keeps_everything() {
        let s = scalar(0.0, 1); // single control value 0
        let r = GridRegion::boxed(vec![-1.0], vec![1.0], &[11], None).unwrap();
        let e = r.discretize().unwrap();
        assert!(stay_set(&s, &r, &e, &ControlWord::constant(0, 5)).is_full());
    }

    #[test]
    fn circle_on_whole_torus() {
        let s = SystemDef::circle(2, uniform_levels(-1.0, 1.0, 3)).unwrap();
        let r = GridRegion::torus(1, &[32], None).unwrap();
        let e = r.discretize().unwrap();
        assert!(stay_set(&s, &r, &e, &ControlWord::new(vec![0, 2, 1])).is_full());
    }

    #[test]
    fn doubling_one_step_matches_inequality() {
        let s = scalar(2.0, 33);
        let r = GridRegion::boxed(vec![-0.5], vec![0.5], &[201], None).unwrap();
        let e = r.discretize().unwrap();
        let eps = r.margin();
        let set = stay_set(&s, &r, &e, &ControlWord::constant(16, 1)); // u = 0
        for (i, x) in e.points().enumerate() {
            assert_eq!(set.contains(i), (2.0 * x[0]).abs() < 0.5 - eps, "x = {}", x[0]);
        }
    }

    #[test]
    fn trie_walk_matches_direct_evaluation() {
        let s = scalar(1.5, 5);
        let r = GridRegion::boxed(vec![-1.0], vec![1.0], &[21], None).unwrap();
        let e = r.discretize().unwrap();
        let pool = CandidatePool::build(5, 3, 1 << 20, 0).unwrap();
        let cov = pool_coverage(&s, &r, &e, &pool, &Sequential);
        let mut k = 0;
        for w in 0..pool.len() {
            let direct = stay_set(&s, &r, &e, &pool.word(w));
            if direct.is_empty() {
                continue;
            }
            assert_eq!(cov[k], (w as u32, direct));
            k += 1;
        }
        assert_eq!(k, cov.len());
    }
}
