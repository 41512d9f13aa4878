//! Nondeterministic channels, zero-error capacity bounds and codebooks.
//!
//! A channel maps each input symbol to the nonempty set of outputs it may
//! produce. Two inputs are confusable when their output sets meet; a
//! codebook is a set of blocks no two of which are confusable in every
//! position, so the receiver can always tell which block was sent.

mod graph;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use graph::{greedy_clique_cover, max_independent_set, strong_power, strong_product, Graph, MIS_CAP};

use crate::{BitSet, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    /// `relation[b]` is the set of symbols input `b` may arrive as.
    relation: Vec<BitSet>,
}

impl Channel {
    pub fn new(alphabet_size: usize, relation: Vec<Vec<usize>>) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::Config("channel alphabet is empty".into()));
        }
        if relation.len() != alphabet_size {
            return Err(Error::Dimension { expected: alphabet_size, got: relation.len() });
        }
        let mut rel = Vec::with_capacity(alphabet_size);
        for (b, outs) in relation.iter().enumerate() {
            if outs.is_empty() {
                return Err(Error::Config(format!("symbol {b} has no possible output")));
            }
            if let Some(&o) = outs.iter().find(|&&o| o >= alphabet_size) {
                return Err(Error::Config(format!("symbol {b} maps to unknown symbol {o}")));
            }
            rel.push(BitSet::from_indices(alphabet_size, outs.iter().copied()));
        }
        Ok(Channel { relation: rel })
    }

    /// Every symbol arrives as itself.
    pub fn noiseless(alphabet_size: usize) -> Self {
        Channel::new(alphabet_size, (0..alphabet_size).map(|b| vec![b]).collect()).unwrap()
    }

    /// Every symbol may arrive as any symbol.
    pub fn all_confusable(alphabet_size: usize) -> Self {
        Channel::new(alphabet_size, vec![(0..alphabet_size).collect(); alphabet_size]).unwrap()
    }

    /// `b ↦ {b, b+1 mod 5}`: confusability graph is the 5-cycle.
    pub fn pentagon() -> Self {
        Channel::new(5, (0..5).map(|b| vec![b, (b + 1) % 5]).collect()).unwrap()
    }

    pub fn alphabet_size(&self) -> usize {
        self.relation.len()
    }

    pub fn outputs(&self, b: usize) -> &BitSet {
        &self.relation[b]
    }

    #[inline]
    pub fn confusable(&self, a: usize, b: usize) -> bool {
        self.relation[a].intersects(&self.relation[b])
    }

    /// Number of deterministic resolutions (one output per input).
    pub fn resolution_count(&self) -> u128 {
        self.relation.iter().map(|s| s.count() as u128).product()
    }

    /// All deterministic resolutions, or `None` above `limit` of them.
    pub fn resolutions(&self, limit: usize) -> Option<Vec<Vec<usize>>> {
        if self.resolution_count() > limit as u128 {
            return None;
        }
        let options: Vec<Vec<usize>> = self.relation.iter().map(|s| s.iter().collect()).collect();
        let mut out = vec![Vec::new()];
        for opts in &options {
            out = out.iter().flat_map(|p| opts.iter().map(move |&o| { let mut q = p.clone(); q.push(o); q })).collect();
        }
        Some(out)
    }
}

/// Edge between distinct inputs whose output sets intersect.
pub fn confusability_graph(ch: &Channel) -> Graph {
    let n = ch.alphabet_size();
    let mut g = Graph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if ch.confusable(a, b) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Confusability of length-`k` blocks built position by position. Block
/// `(s_1, …, s_k)` has mixed-radix index with `s_1` most significant.
pub fn block_confusability_graph(ch: &Channel, k: usize) -> Graph {
    let q = ch.alphabet_size();
    let n = q.pow(k as u32);
    let digits = |mut x: usize| {
        let mut d = vec![0; k];
        for slot in d.iter_mut().rev() {
            *slot = x % q;
            x /= q;
        }
        d
    };
    let mut g = Graph::empty(n);
    for a in 0..n {
        let da = digits(a);
        for b in a + 1..n {
            if da.iter().zip(digits(b)).all(|(&x, y)| ch.confusable(x, y)) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockBound {
    pub k: usize,
    /// Independence number of the `k`-block graph, if it was computed.
    pub alpha: Option<usize>,
    /// Size of a greedy clique cover of the `k`-block graph.
    pub clique_cover: usize,
    pub lower: Option<f64>,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBounds {
    /// `max_k (1/k) log₂ α(G^⊠k)`: rates achievable at zero error.
    pub lower: f64,
    /// `min_k (1/k) log₂ θ_k` with `θ_k` a clique cover size of `G^⊠k`;
    /// valid since a clique holds at most one codeword.
    pub upper: f64,
    pub per_k: Vec<BlockBound>,
    pub diagnostics: Vec<String>,
}

/// Largest graph handed to the greedy clique cover.
const COVER_CAP: usize = 1 << 12;

/// Certified bounds on the zero-error capacity from blocks of length
/// `1..=k_max`.
pub fn zero_error_capacity_bounds(ch: &Channel, k_max: usize) -> Result<CapacityBounds> {
    if k_max == 0 {
        return Err(Error::Config("k_max must be at least 1".into()));
    }
    let g = confusability_graph(ch);
    let q = ch.alphabet_size();
    let mut per_k = Vec::new();
    let mut diagnostics = Vec::new();
    let mut power = Graph::empty(1);
    for k in 1..=k_max {
        let n = q.checked_pow(k as u32).unwrap_or(usize::MAX);
        if n > COVER_CAP {
            diagnostics.push(format!("stopped at block length {}: {n} blocks exceed the graph size limit", k - 1));
            break;
        }
        power = strong_product(&power, &g);
        let theta = greedy_clique_cover(&power).len();
        let alpha = if n <= MIS_CAP {
            Some(max_independent_set(&power)?.0)
        } else {
            diagnostics.push(format!("block length {k}: {n} vertices exceed the exact independence cap {MIS_CAP}"));
            None
        };
        let kf = k as f64;
        per_k.push(BlockBound {
            k,
            alpha,
            clique_cover: theta,
            lower: alpha.map(|a| libm::log2(a as f64) / kf),
            upper: libm::log2(theta as f64) / kf,
        });
    }
    if per_k.iter().all(|b| b.alpha.is_none()) {
        return Err(Error::GraphTooLarge { vertices: q, cap: MIS_CAP });
    }
    let lower = per_k.iter().filter_map(|b| b.lower).fold(0.0, f64::max);
    let upper = per_k.iter().map(|b| b.upper).fold(f64::INFINITY, f64::min);
    Ok(CapacityBounds { lower, upper, per_k, diagnostics })
}

/// Pairwise distinguishable blocks of a fixed length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    pub block_len: usize,
    pub words: Vec<Vec<usize>>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Exhaustive pairwise check: some position of every pair has disjoint
    /// output sets.
    pub fn verify(&self, ch: &Channel) -> Result<()> {
        for (i, a) in self.words.iter().enumerate() {
            if a.len() != self.block_len || a.iter().any(|&s| s >= ch.alphabet_size()) {
                return Err(Error::Verification(format!("codeword {i} is malformed")));
            }
            for (j, b) in self.words.iter().enumerate().skip(i + 1) {
                if a.iter().zip(b).all(|(&x, &y)| ch.confusable(x, y)) {
                    return Err(Error::Verification(format!("codewords {i} and {j} are confusable")));
                }
            }
        }
        Ok(())
    }

    /// Index of the codeword that can arrive as `received`.
    pub fn decode(&self, ch: &Channel, received: &[usize]) -> Option<usize> {
        self.words
            .iter()
            .position(|w| w.len() == received.len() && w.iter().zip(received).all(|(&s, &r)| ch.outputs(s).contains(r)))
    }
}

fn block_digits(x: usize, q: usize, k: usize) -> Vec<usize> {
    let mut d = vec![0; k];
    let mut x = x;
    for slot in d.iter_mut().rev() {
        *slot = x % q;
        x /= q;
    }
    d
}

/// Independent blocks of length `k` from an exact search.
fn exact_blocks(ch: &Channel, k: usize) -> Result<Vec<Vec<usize>>> {
    let g = block_confusability_graph(ch, k);
    let (_, w) = max_independent_set(&g)?;
    Ok(w.into_iter().map(|x| block_digits(x, ch.alphabet_size(), k)).collect())
}

/// `M` pairwise distinguishable blocks of length `k`.
///
/// When `|B|^k` is within the exact cap the blocks are an independent set
/// of maximum size. Otherwise they are concatenations of maximum
/// independent sets of shorter blocks (products of independent sets stay
/// independent), using the split that yields the most words.
pub fn build_codebook(ch: &Channel, k: usize, m: usize) -> Result<Codebook> {
    if k == 0 {
        return Err(Error::Config("block length must be at least 1".into()));
    }
    let q = ch.alphabet_size();
    let exact_len = (1..=k).take_while(|&j| q.checked_pow(j as u32).is_some_and(|n| n <= MIS_CAP)).last();
    let Some(jmax) = exact_len else {
        return Err(Error::GraphTooLarge { vertices: q, cap: MIS_CAP });
    };
    let mut sets: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for j in 1..=jmax {
        sets.push(exact_blocks(ch, j)?);
    }
    // best split of k into parts of length <= jmax
    let mut best: Vec<(f64, Vec<usize>)> = vec![(0.0, Vec::new())];
    for len in 1..=k {
        let mut cand: Option<(f64, Vec<usize>)> = None;
        for j in 1..=jmax.min(len) {
            let (v, parts) = &best[len - j];
            let score = v + libm::log2(sets[j].len() as f64);
            if cand.as_ref().is_none_or(|c| score > c.0 + 1e-12) {
                let mut p = parts.clone();
                p.push(j);
                cand = Some((score, p));
            }
        }
        best.push(cand.unwrap());
    }
    let parts = &best[k].1;
    let available = parts.iter().try_fold(1usize, |acc, &j| acc.checked_mul(sets[j].len())).unwrap_or(usize::MAX);
    if m > available {
        return Err(Error::CodebookTooLarge { requested: m, available, block_len: k });
    }
    let mut words = Vec::with_capacity(m);
    for idx in 0..m {
        let mut rest = idx;
        let mut word = Vec::with_capacity(k);
        let mut chunks = Vec::with_capacity(parts.len());
        for &j in parts.iter().rev() {
            chunks.push(&sets[j][rest % sets[j].len()]);
            rest /= sets[j].len();
        }
        for c in chunks.iter().rev() {
            word.extend_from_slice(c);
        }
        words.push(word);
    }
    Ok(Codebook { block_len: k, words })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graphs_of_simple_channels() {
        assert_eq!(confusability_graph(&Channel::noiseless(4)), Graph::empty(4));
        assert_eq!(confusability_graph(&Channel::all_confusable(4)), Graph::complete(4));
        let z = Channel::new(2, vec![vec![0], vec![0, 1]]).unwrap();
        assert_eq!(confusability_graph(&z), Graph::from_edges(2, &[(0, 1)]));
        assert_eq!(confusability_graph(&Channel::pentagon()), Graph::cycle(5));
    }

    #[test]
    fn capacity_bounds() {
        let b = zero_error_capacity_bounds(&Channel::noiseless(2), 3).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let b = zero_error_capacity_bounds(&Channel::all_confusable(3), 2).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let b = zero_error_capacity_bounds(&Channel::pentagon(), 2).unwrap();
        assert!((b.lower - 0.5 * libm::log2(5.0)).abs() < 1e-12);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn codebooks() {
        let c = build_codebook(&Channel::noiseless(2), 3, 8).unwrap();
        assert_eq!(c.len(), 8);
        c.verify(&Channel::noiseless(2)).unwrap();
        let p = Channel::pentagon();
        let c = build_codebook(&p, 1, 2).unwrap();
        c.verify(&p).unwrap();
        assert!(!p.confusable(c.words[0][0], c.words[1][0]));
        assert_eq!(build_codebook(&p, 1, 3), Err(Error::CodebookTooLarge { requested: 3, available: 2, block_len: 1 }));
        let c = build_codebook(&p, 2, 5).unwrap();
        c.verify(&p).unwrap();
    }

    #[test]
    fn composed_codebook_above_cap() {
        // 4 symbols, capacity one bit: 4^6 blocks are past the exact cap
        let ch = Channel::new(4, vec![vec![0, 1], vec![1], vec![2, 3], vec![3]]).unwrap();
        let c = build_codebook(&ch, 6, 64).unwrap();
        c.verify(&ch).unwrap();
        assert!(matches!(build_codebook(&ch, 6, 65), Err(Error::CodebookTooLarge { available: 64, .. })));
    }

    #[test]
    fn decoding_under_every_resolution() {
        let ch = Channel::pentagon();
        let c = build_codebook(&ch, 2, 5).unwrap();
        for r in ch.resolutions(1 << 10).unwrap() {
            for (i, w) in c.words.iter().enumerate() {
                let rx: Vec<usize> = w.iter().map(|&s| r[s]).collect();
                assert_eq!(c.decode(&ch, &rx), Some(i));
            }
        }
    }
}
