//! Minimum set cover over bitsets.
//!
//! Exact mode is a depth-first branch-and-bound: greedy supplies the
//! initial upper bound, the lower bound at each node is the larger of the
//! degree bound `⌈uncovered / max new coverage⌉` and a packing bound
//! (uncovered elements no two of which share a set), and the branching
//! element is the uncovered one with the fewest covering sets. Duplicate
//! and dominated sets and dominated elements are removed once at the root.
//! All ties break toward the lowest index, so results are deterministic.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{BitSet, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    #[default]
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverInstance {
    pub n_elements: usize,
    pub sets: Vec<BitSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    /// Indices into the instance's sets, ascending.
    pub chosen: Vec<usize>,
    /// False only when exact search stopped at its node limit.
    pub optimal: bool,
    pub nodes: u64,
}

impl CoverInstance {
    pub fn new(n_elements: usize, sets: Vec<BitSet>) -> Self {
        debug_assert!(sets.iter().all(|s| s.len() == n_elements));
        CoverInstance { n_elements, sets }
    }

    pub fn uncovered(&self) -> Vec<usize> {
        let mut all = BitSet::new(self.n_elements);
        for s in &self.sets {
            all.union_with(s);
        }
        (0..self.n_elements).filter(|&e| !all.contains(e)).collect()
    }

    pub fn is_cover(&self, chosen: &[usize]) -> bool {
        let mut all = BitSet::new(self.n_elements);
        for &i in chosen {
            all.union_with(&self.sets[i]);
        }
        all.is_full()
    }
}

pub fn min_cover(inst: &CoverInstance, mode: CoverMode) -> Result<CoverSolution> {
    min_cover_limited(inst, mode, None)
}

/// Like [`min_cover`]; exact search gives up proving optimality after
/// `node_limit` nodes and returns its best cover with `optimal = false`.
pub fn min_cover_limited(inst: &CoverInstance, mode: CoverMode, node_limit: Option<u64>) -> Result<CoverSolution> {
    let uncovered = inst.uncovered();
    if !uncovered.is_empty() {
        return Err(Error::Infeasible { uncovered });
    }
    if inst.n_elements == 0 {
        return Ok(CoverSolution { chosen: Vec::new(), optimal: true, nodes: 0 });
    }
    let greedy = greedy_cover(&inst.sets, inst.n_elements);
    match mode {
        CoverMode::Greedy => Ok(CoverSolution { chosen: sorted(greedy), optimal: false, nodes: 0 }),
        CoverMode::Exact => Ok(exact(inst, greedy, node_limit)),
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Classical greedy: most newly covered elements first, lowest index on ties.
pub fn greedy_cover(sets: &[BitSet], n: usize) -> Vec<usize> {
    let mut uncovered = BitSet::full(n);
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let mut best = (0, usize::MAX);
        for (i, s) in sets.iter().enumerate() {
            let gain = s.intersection_count(&uncovered);
            if gain > best.0 {
                best = (gain, i);
            }
        }
        if best.0 == 0 {
            break;
        }
        uncovered.difference_with(&sets[best.1]);
        chosen.push(best.1);
    }
    chosen
}

/// Reduced instance: surviving sets (with their original index) restricted
/// to the surviving elements.
struct Reduced {
    sets: Vec<BitSet>,
    origin: Vec<usize>,
    n: usize,
}

fn reduce(inst: &CoverInstance) -> Reduced {
    // Identical sets: keep the lowest index.
    let mut order: Vec<usize> = (0..inst.sets.len()).filter(|&i| !inst.sets[i].is_empty()).collect();
    order.sort_by(|&a, &b| inst.sets[a].cmp(&inst.sets[b]).then(a.cmp(&b)));
    order.dedup_by(|b, a| inst.sets[*a] == inst.sets[*b]);

    // Dominated sets: scan by decreasing size, keep sets not contained in a
    // kept one. Among equal sizes containment means equality, already gone.
    let counts: Vec<usize> = inst.sets.iter().map(BitSet::count).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        if !kept.iter().any(|&k| inst.sets[i].is_subset(&inst.sets[k])) {
            kept.push(i);
        }
    }
    kept.sort_unstable();

    // Element reduction: if every set containing e also contains f, any
    // cover of e covers f and f can be dropped. Skipped when the pairwise
    // column test would be too costly.
    let n = inst.n_elements;
    let s = kept.len();
    let mut alive: Vec<usize> = (0..n).collect();
    if (n as u128) * (n as u128) * (s as u128) / 64 <= 200_000_000 {
        let cols: Vec<BitSet> =
            (0..n).map(|e| BitSet::from_indices(s, (0..s).filter(|&j| inst.sets[kept[j]].contains(e)))).collect();
        let mut dropped = vec![false; n];
        for e in 0..n {
            if dropped[e] {
                continue;
            }
            for f in 0..n {
                if f == e || dropped[f] {
                    continue;
                }
                // identical columns: keep the lower element
                if cols[e].is_subset(&cols[f]) && (cols[e] != cols[f] || f > e) {
                    dropped[f] = true;
                }
            }
        }
        alive.retain(|&e| !dropped[e]);
    }
    let sets = kept.iter().map(|&i| BitSet::from_indices(alive.len(), (0..alive.len()).filter(|&k| inst.sets[i].contains(alive[k])))).collect();
    Reduced { sets, origin: kept, n: alive.len() }
}

struct Search<'a> {
    sets: &'a [BitSet],
    /// For each element, the sets containing it.
    cols: Vec<BitSet>,
    covering: Vec<Vec<usize>>,
    by_degree: Vec<usize>,
    best: Vec<usize>,
    stack: Vec<usize>,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

impl Search<'_> {
    fn packing_bound(&self, uncovered: &BitSet, order: impl Iterator<Item = usize>) -> usize {
        let mut used = BitSet::new(self.sets.len());
        let mut count = 0;
        for e in order {
            if uncovered.contains(e) && !self.cols[e].intersects(&used) {
                used.union_with(&self.cols[e]);
                count += 1;
            }
        }
        count
    }

    fn lower_bound(&self, uncovered: &BitSet) -> usize {
        let remaining = uncovered.count();
        let max_gain = self.sets.iter().map(|s| s.intersection_count(uncovered)).max().unwrap_or(0);
        if max_gain == 0 {
            return usize::MAX;
        }
        let degree = remaining.div_ceil(max_gain);
        let pack = self
            .packing_bound(uncovered, uncovered.iter())
            .max(self.packing_bound(uncovered, self.by_degree.iter().copied()));
        degree.max(pack)
    }

    fn run(&mut self, uncovered: BitSet) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        if uncovered.is_empty() {
            if self.stack.len() < self.best.len() {
                self.best = self.stack.clone();
            }
            return;
        }
        let lb = self.lower_bound(&uncovered);
        if lb == usize::MAX || self.stack.len() + lb >= self.best.len() {
            return;
        }
        let pivot = uncovered
            .iter()
            .min_by_key(|&e| (self.covering[e].len(), e))
            .expect("nonempty");
        let mut cands: Vec<(usize, usize)> =
            self.covering[pivot].iter().map(|&j| (self.sets[j].intersection_count(&uncovered), j)).collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, j) in cands {
            let mut next = uncovered.clone();
            next.difference_with(&self.sets[j]);
            self.stack.push(j);
            self.run(next);
            self.stack.pop();
            if self.aborted || self.stack.len() + 1 >= self.best.len() {
                break;
            }
        }
    }
}

fn exact(inst: &CoverInstance, greedy: Vec<usize>, node_limit: Option<u64>) -> CoverSolution {
    let red = reduce(inst);
    let cols: Vec<BitSet> =
        (0..red.n).map(|e| BitSet::from_indices(red.sets.len(), (0..red.sets.len()).filter(|&j| red.sets[j].contains(e)))).collect();
    let covering: Vec<Vec<usize>> = cols.iter().map(|c| c.iter().collect()).collect();
    let mut by_degree: Vec<usize> = (0..red.n).collect();
    by_degree.sort_by_key(|&e| (covering[e].len(), e));

    let mut search = Search {
        sets: &red.sets,
        cols,
        covering,
        by_degree,
        best: greedy_cover(&red.sets, red.n),
        stack: Vec::new(),
        nodes: 0,
        limit: node_limit.unwrap_or(u64::MAX),
        aborted: false,
    };
    search.run(BitSet::full(red.n));
    // Reductions preserve the optimum; the original greedy can only win
    // when the search was cut short.
    let chosen: Vec<usize> = if search.best.len() <= greedy.len() {
        search.best.iter().map(|&j| red.origin[j]).collect()
    } else {
        greedy
    };
    CoverSolution { chosen: sorted(chosen), optimal: !search.aborted, nodes: search.nodes }
}
