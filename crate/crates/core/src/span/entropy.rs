//! Minimal spanning sets on the grid and the entropy estimates built on them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::cover::{min_cover_limited, CoverInstance, CoverMode};
use super::pool::{CandidatePool, DEFAULT_POOL_CAP};
use super::stay::{pool_coverage, stay_set};
use super::subsystem::SubsystemAbstraction;
use crate::region::GridElements;
use crate::{BitSet, ControlWord, Error, Executor, GridRegion, Result, SystemDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub mode: CoverMode,
    pub pool_cap: usize,
    pub seed: u64,
    /// Branch-and-bound node limit; `None` searches to optimality.
    pub node_limit: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mode: CoverMode::Exact, pool_cap: DEFAULT_POOL_CAP, seed: 0, node_limit: None }
    }
}

/// A spanning set with the element-to-word assignment that certifies it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningSolution {
    pub tau: usize,
    /// Set for subsystem solutions: the component whose words are counted.
    pub component: Option<usize>,
    pub words: Vec<ControlWord>,
    /// For each grid element, an index into `words` of a covering word.
    pub selector: Vec<u32>,
    pub cardinality: usize,
    pub pool_size: usize,
    pub pool_sampled: bool,
    pub seed: u64,
    /// Proven minimal over the candidate pool.
    pub optimal: bool,
}

impl SpanningSolution {
    /// `(1/τ) log₂ #words`.
    pub fn rate(&self) -> f64 {
        libm::log2(self.cardinality as f64) / self.tau as f64
    }
}

/// Constant words, tried before a full pool search: a single word covering
/// every element is a minimum cover on its own.
fn constant_words(alphabet_size: usize, tau: usize) -> impl Iterator<Item = ControlWord> {
    (0..alphabet_size as u32).map(move |u| ControlWord::constant(u, tau))
}

fn solve(
    n: usize,
    coverage: Vec<(u32, BitSet)>,
    pool: &CandidatePool,
    tau: usize,
    component: Option<usize>,
    opts: &SolveOptions,
) -> Result<SpanningSolution> {
    let (ids, sets): (Vec<u32>, Vec<BitSet>) = coverage.into_iter().unzip();
    let inst = CoverInstance::new(n, sets);
    let sol = match min_cover_limited(&inst, opts.mode, opts.node_limit) {
        Ok(s) => s,
        Err(Error::Infeasible { uncovered }) => return Err(Error::NotInvariant { uncovered, total: n }),
        Err(e) => return Err(e),
    };
    let words: Vec<ControlWord> = sol.chosen.iter().map(|&c| pool.word(ids[c] as usize)).collect();
    let selector = selector_for(n, sol.chosen.iter().map(|&c| &inst.sets[c]));
    Ok(SpanningSolution {
        tau,
        component,
        cardinality: words.len(),
        words,
        selector,
        pool_size: pool.len(),
        pool_sampled: pool.is_sampled(),
        seed: opts.seed,
        optimal: sol.optimal && opts.mode == CoverMode::Exact,
    })
}

fn selector_for<'a>(n: usize, sets: impl Iterator<Item = &'a BitSet>) -> Vec<u32> {
    let mut sel = alloc::vec![u32::MAX; n];
    for (k, s) in sets.enumerate() {
        for e in s.iter() {
            if sel[e] == u32::MAX {
                sel[e] = k as u32;
            }
        }
    }
    sel
}

fn single_word(n: usize, word: ControlWord, tau: usize, component: Option<usize>, probed: usize, seed: u64) -> SpanningSolution {
    SpanningSolution {
        tau,
        component,
        words: alloc::vec![word],
        selector: alloc::vec![0; n],
        cardinality: 1,
        pool_size: probed,
        pool_sampled: false,
        seed,
        optimal: true,
    }
}

/// Minimal `(τ, Q)`-spanning set over the candidate pool.
pub fn r_inv(
    system: &SystemDef,
    region: &GridRegion,
    tau: usize,
    opts: &SolveOptions,
    exec: &dyn Executor,
) -> Result<SpanningSolution> {
    check_region(system, region)?;
    let elements = region.discretize()?;
    r_inv_on(system, region, &elements, tau, opts, exec)
}

pub fn r_inv_on(
    system: &SystemDef,
    region: &GridRegion,
    elements: &GridElements,
    tau: usize,
    opts: &SolveOptions,
    exec: &dyn Executor,
) -> Result<SpanningSolution> {
    let pool = CandidatePool::build(system.alphabet_size(), tau, opts.pool_cap, opts.seed)?;
    for (k, w) in constant_words(system.alphabet_size(), tau).enumerate() {
        if stay_set(system, region, elements, &w).is_full() {
            return Ok(single_word(elements.len(), w, tau, None, k + 1, opts.seed));
        }
    }
    let cov = pool_coverage(system, region, elements, &pool, exec);
    solve(elements.len(), cov, &pool, tau, None, opts)
}

/// [`r_inv`] over an explicit list of candidate words.
pub fn r_inv_from_words(
    system: &SystemDef,
    region: &GridRegion,
    words: &[ControlWord],
    opts: &SolveOptions,
    exec: &dyn Executor,
) -> Result<SpanningSolution> {
    check_region(system, region)?;
    let tau = words.first().map(ControlWord::len).ok_or_else(|| Error::Config("empty word list".into()))?;
    let elements = region.discretize()?;
    let pool = CandidatePool::from_words(system.alphabet_size(), tau, words)?;
    let cov = pool_coverage(system, region, &elements, &pool, exec);
    solve(elements.len(), cov, &pool, tau, None, opts)
}

/// Minimal `(τ, Q)^{(i)}`-spanning set: words of component `i` only, the
/// other components free on their lattice.
pub fn r_inv_subsystem(
    system: &SystemDef,
    region: &GridRegion,
    tau: usize,
    i: usize,
    opts: &SolveOptions,
    exec: &dyn Executor,
) -> Result<SpanningSolution> {
    check_region(system, region)?;
    let elements = region.discretize()?;
    let abs = SubsystemAbstraction::new(system, region, &elements, i)?;
    let size = abs.component().alphabet_size();
    let pool = CandidatePool::build(size, tau, opts.pool_cap, opts.seed)?;
    for (k, w) in constant_words(size, tau).enumerate() {
        if abs.coverage(&w.entries).is_full() {
            return Ok(single_word(elements.len(), w, tau, Some(i), k + 1, opts.seed));
        }
    }
    let cov = abs.pool_coverage(&pool, exec);
    solve(elements.len(), cov, &pool, tau, Some(i), opts)
}

fn check_region(system: &SystemDef, region: &GridRegion) -> Result<()> {
    if system.state_dim() != region.dim() {
        return Err(Error::Dimension { expected: system.state_dim(), got: region.dim() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Smallest per-horizon rate: the tightest finite-horizon upper estimate.
    pub best: f64,
    pub per_tau: Vec<f64>,
}

/// Rates `(1/τ) log₂ r` for `(τ, r)` pairs and their minimum.
pub fn entropy_estimate(values: &[(usize, usize)]) -> Result<EntropyEstimate> {
    if values.is_empty() {
        return Err(Error::Config("no (tau, cardinality) pairs".into()));
    }
    let mut per_tau = Vec::with_capacity(values.len());
    for &(tau, r) in values {
        if tau == 0 || r == 0 {
            return Err(Error::Config(format!("invalid pair ({tau}, {r})")));
        }
        per_tau.push(libm::log2(r as f64) / tau as f64);
    }
    let best = per_tau.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EntropyEstimate { best, per_tau })
}

/// Elements no word in `words` keeps inside `Q`.
pub fn uncovered_by(system: &SystemDef, region: &GridRegion, elements: &GridElements, words: &[ControlWord]) -> Vec<usize> {
    let mut all = BitSet::new(elements.len());
    for w in words {
        all.union_with(&stay_set(system, region, elements, w));
    }
    (0..elements.len()).filter(|&e| !all.contains(e)).collect()
}

/// Check that `words` is `(τ, Q)`-spanning on the grid.
pub fn verify_spanning(system: &SystemDef, region: &GridRegion, words: &[ControlWord]) -> Result<()> {
    let elements = region.discretize()?;
    let missing = uncovered_by(system, region, &elements, words);
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(describe_missing(&elements, &missing)))
    }
}

/// Check that component-`i` words are `(τ, Q)^{(i)}`-spanning on the grid.
pub fn verify_subsystem(system: &SystemDef, region: &GridRegion, i: usize, words: &[ControlWord]) -> Result<()> {
    let elements = region.discretize()?;
    let abs = SubsystemAbstraction::new(system, region, &elements, i)?;
    let mut all = BitSet::new(elements.len());
    for w in words {
        all.union_with(&abs.coverage(&w.entries));
    }
    let missing: Vec<usize> = (0..elements.len()).filter(|&e| !all.contains(e)).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(describe_missing(&elements, &missing)))
    }
}

fn describe_missing(elements: &GridElements, missing: &[usize]) -> String {
    format!("{} of {} grid points uncovered, first at {:?}", missing.len(), elements.len(), elements.point(missing[0]))
}

/// All concatenations `αβ` with `α ∈ a`, `β ∈ b`.
pub fn concat_words(a: &[ControlWord], b: &[ControlWord]) -> Vec<ControlWord> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.concat(y))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::uniform_levels;
    use crate::{Matrix, Sequential};
    use alloc::vec;

    fn scalar(a: f64, levels: usize) -> SystemDef {
        SystemDef::linear(Matrix::from_element(1, 1, a), Matrix::from_element(1, 1, 1.0), uniform_levels(-1.0, 1.0, levels))
            .unwrap()
    }

    #[test]
    fn estimate_arithmetic() {
        let e = entropy_estimate(&[(1, 2)]).unwrap();
        assert_eq!(e.best, 1.0);
        let e = entropy_estimate(&[(1, 4), (2, 8)]).unwrap();
        assert_eq!(e.per_tau, [2.0, 1.5]);
        assert_eq!(e.best, 1.5);
        assert!(entropy_estimate(&[]).is_err());
    }

    #[test]
    fn zero_map_needs_one_word() {
        let s = SystemDef::linear(Matrix::zeros(1, 1), Matrix::from_element(1, 1, 1.0), vec![vec![0.0]]).unwrap();
        let r = GridRegion::boxed(vec![-1.0], vec![1.0], &[11], None).unwrap();
        for tau in 1..5 {
            assert_eq!(r_inv(&s, &r, tau, &SolveOptions::default(), &Sequential).unwrap().cardinality, 1);
        }
    }

    #[test]
    fn doubling_one_step_matches_exhaustive_cover() {
        let s = scalar(2.0, 33);
        let r = GridRegion::boxed(vec![-0.5], vec![0.5], &[201], None).unwrap();
        let sol = r_inv(&s, &r, 1, &SolveOptions::default(), &Sequential).unwrap();
        // each word u keeps x iff |2x + u| < 0.5 - eps, an open interval of
        // width (1 - 2 eps)/2 in x; 201 points spaced 0.005 need at least
        // ceil(1 / 0.495) intervals
        assert_eq!(sol.cardinality, 3);
        verify_spanning(&s, &r, &sol.words).unwrap();
        assert!(sol.selector.iter().all(|&k| (k as usize) < sol.words.len()));
    }

    #[test]
    fn not_invariant_is_reported() {
        let s = scalar(3.0, 3);
        let r = GridRegion::boxed(vec![-1.0], vec![1.0], &[21], None).unwrap();
        let err = r_inv(&s, &r, 1, &SolveOptions::default(), &Sequential).unwrap_err();
        assert!(matches!(err, Error::NotInvariant { total: 21, .. }));
    }
}
