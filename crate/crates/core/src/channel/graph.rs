//! Undirected graphs on `0..n` with bitset adjacency.

use alloc::vec;
use alloc::vec::Vec;

use crate::{BitSet, Error, Result};

/// Vertex cap for exact independence search.
pub const MIS_CAP: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![BitSet::new(n); n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for a in 0..n {
            g.add_edge(a, (a + 1) % n);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Self-loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, a: usize) -> &BitSet {
        &self.adj[a]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum::<usize>() / 2
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| a != b && !self.adjacent(a, b)))
    }
}

/// Strong product: `(a, b) ~ (a', b')` iff each coordinate is equal or
/// adjacent and the pairs differ. Vertex `(a, b)` has index `a·|H| + b`.
pub fn strong_product(g: &Graph, h: &Graph) -> Graph {
    let (n, m) = (g.n(), h.n());
    let mut p = Graph::empty(n * m);
    for a in 0..n {
        for a2 in 0..n {
            if a != a2 && !g.adjacent(a, a2) {
                continue;
            }
            for b in 0..m {
                for b2 in 0..m {
                    if (b == b2 || h.adjacent(b, b2)) && (a, b) != (a2, b2) {
                        p.adj[a * m + b].insert(a2 * m + b2);
                    }
                }
            }
        }
    }
    p
}

/// `k`-fold strong power; `k = 0` gives the one-vertex graph.
pub fn strong_power(g: &Graph, k: usize) -> Graph {
    let mut p = Graph::empty(1);
    for _ in 0..k {
        p = strong_product(&p, g);
    }
    p
}

/// Exact independence number with a sorted witness.
///
/// Runs a maximum clique search on the complement: candidates are colored
/// greedily, and a branch is cut when the clique size plus the number of
/// colors left cannot beat the incumbent.
pub fn max_independent_set(g: &Graph) -> Result<(usize, Vec<usize>)> {
    let n = g.n();
    if n > MIS_CAP {
        return Err(Error::GraphTooLarge { vertices: n, cap: MIS_CAP });
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // complement adjacency as masks
    let comp: Vec<u64> = (0..n)
        .map(|a| {
            let nb = g.adj[a].words().first().copied().unwrap_or(0);
            all & !nb & !(1u64 << a)
        })
        .collect();
    let mut search = Clique { comp: &comp, best: Vec::new(), current: Vec::new() };
    search.expand(all);
    let mut w = search.best;
    w.sort_unstable();
    Ok((w.len(), w))
}

struct Clique<'a> {
    comp: &'a [u64],
    best: Vec<usize>,
    current: Vec<usize>,
}

impl Clique<'_> {
    /// Greedy sequential coloring of `p` in index order; returns vertices
    /// with their color bound, colors nondecreasing.
    fn color(&self, mut p: u64) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.count_ones() as usize);
        let mut color = 0;
        while p != 0 {
            color += 1;
            let mut q = p;
            while q != 0 {
                let v = q.trailing_zeros() as usize;
                q &= !(1u64 << v);
                // same color class: pairwise non-adjacent in the complement
                q &= !self.comp[v];
                p &= !(1u64 << v);
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, mut p: u64) {
        let order = self.color(p);
        for &(v, c) in order.iter().rev() {
            if self.current.len() + c <= self.best.len() {
                return;
            }
            self.current.push(v);
            let next = p & self.comp[v];
            if next == 0 {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            p &= !(1u64 << v);
        }
    }
}

/// Clique cover built largest-first: seed each clique with the uncovered
/// vertex of highest degree, then grow it with the highest-degree
/// uncovered vertices adjacent to all members. Ties go to the lowest index.
pub fn greedy_clique_cover(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut uncovered = BitSet::full(n);
    let deg: Vec<usize> = (0..n).map(|a| g.degree(a)).collect();
    let pick = |cands: &BitSet| cands.iter().max_by(|&a, &b| deg[a].cmp(&deg[b]).then(b.cmp(&a)));
    let mut cover = Vec::new();
    while let Some(seed) = pick(&uncovered) {
        let mut clique = vec![seed];
        uncovered.remove(seed);
        let mut cands = uncovered.clone();
        cands.intersect_with(&g.adj[seed]);
        while let Some(v) = pick(&cands) {
            clique.push(v);
            uncovered.remove(v);
            cands.remove(v);
            cands.intersect_with(&g.adj[v]);
        }
        clique.sort_unstable();
        cover.push(clique);
    }
    cover
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_independence_numbers() {
        assert_eq!(max_independent_set(&Graph::empty(7)).unwrap().0, 7);
        assert_eq!(max_independent_set(&Graph::complete(6)).unwrap().0, 1);
        let c5 = Graph::cycle(5);
        let (a, w) = max_independent_set(&c5).unwrap();
        assert_eq!(a, 2);
        assert!(c5.is_independent(&w));
        let (a, w) = max_independent_set(&strong_product(&c5, &c5)).unwrap();
        assert_eq!(a, 5);
        assert!(strong_product(&c5, &c5).is_independent(&w));
    }

    #[test]
    fn product_with_single_vertex() {
        let c5 = Graph::cycle(5);
        assert_eq!(strong_product(&c5, &Graph::empty(1)), c5);
        assert_eq!(strong_product(&Graph::empty(2), &Graph::empty(3)), Graph::empty(6));
    }

    #[test]
    fn cap_enforced() {
        assert_eq!(max_independent_set(&Graph::empty(41)), Err(Error::GraphTooLarge { vertices: 41, cap: 40 }));
    }

    #[test]
    fn clique_cover_is_a_partition_into_cliques() {
        let g = strong_product(&Graph::cycle(5), &Graph::cycle(4));
        let cover = greedy_clique_cover(&g);
        let mut seen = vec![false; g.n()];
        for c in &cover {
            for (i, &a) in c.iter().enumerate() {
                assert!(!seen[a]);
                seen[a] = true;
                assert!(c[i + 1..].iter().all(|&b| g.adjacent(a, b)));
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(greedy_clique_cover(&Graph::cycle(5)).len(), 3);
    }
}
