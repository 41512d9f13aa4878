//! Finite-time entropy vectors of product spanning families.
//!
//! A family `S₁ × ⋯ × Sₙ` of per-component word sets covers a grid element
//! when some joint word from the family keeps it inside `Q`. Its entropy
//! vector is `(log₂ #S₁, …, log₂ #Sₙ) / τ`. For two components the sweep
//! below fixes the size of one set, picks it greedily, and solves a set
//! cover for the other; both orientations are run and the results are
//! Pareto-filtered. Small instances can be enumerated exactly instead.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::cover::{greedy_cover, min_cover, CoverInstance, CoverMode};
use super::pool::CandidatePool;
use super::stay::{pool_coverage, stay_set_masked};
use crate::region::GridElements;
use crate::{BitSet, ControlWord, Error, Executor, GridRegion, Result, SystemDef};

/// Largest pools and grids for which exact enumeration is offered.
pub const EXACT_MAX_POOL: usize = 12;
pub const EXACT_MAX_ELEMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub rates: Vec<f64>,
    pub sizes: Vec<usize>,
    /// One word set per component.
    pub witness: Vec<Vec<ControlWord>>,
}

impl FrontierPoint {
    fn new(tau: usize, witness: Vec<Vec<ControlWord>>) -> Self {
        let sizes: Vec<usize> = witness.iter().map(Vec::len).collect();
        let rates = sizes.iter().map(|&s| libm::log2(s as f64) / tau as f64).collect();
        FrontierPoint { rates, sizes, witness }
    }

    pub fn tau(&self) -> usize {
        self.witness.first().and_then(|s| s.first()).map_or(0, ControlWord::len)
    }

    /// `log₂` of the number of joint words in the family.
    pub fn log_family_size(&self) -> f64 {
        self.sizes.iter().map(|&s| libm::log2(s as f64)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyFrontier {
    pub tau: usize,
    pub points: Vec<FrontierPoint>,
    /// All subsets of the first pool were enumerated.
    pub exact: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierOptions {
    /// Enumerate exactly when the instance is small enough.
    pub exact: bool,
    /// Swap evaluations allowed per budget during local improvement.
    pub swap_budget: usize,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        FrontierOptions { exact: false, swap_budget: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolSearch {
    /// DFS nodes allowed per grid element.
    pub node_budget: usize,
    pub max_pool: usize,
}

impl Default for PoolSearch {
    fn default() -> Self {
        PoolSearch { node_budget: 100_000, max_pool: 256 }
    }
}

/// Index of the smallest-norm control (lowest index on ties).
pub fn neutral_control(system: &SystemDef) -> usize {
    (0..system.alphabet_size())
        .map(|u| (system.control_value(u).unwrap().iter().map(|v| v * v).sum::<f64>(), u))
        .fold((f64::INFINITY, 0), |best, c| if c.0 < best.0 { c } else { best })
        .1
}

/// Candidate pools for a frontier sweep.
///
/// Pool `i` holds the neutral constant word of component `i` plus, for
/// each grid element not yet handled, the first word of component `i`
/// found by depth-first search (controls by increasing norm) that keeps
/// the element inside `Q` while every other component plays its neutral
/// word.
pub fn selector_pools(
    system: &SystemDef,
    region: &GridRegion,
    tau: usize,
    search: &PoolSearch,
) -> Result<(Vec<Vec<ControlWord>>, Vec<String>)> {
    let elements = region.discretize()?;
    let comps = system.components();
    let neutral: Vec<usize> = comps.iter().map(neutral_control).collect();
    let mut pools = Vec::with_capacity(comps.len());
    let mut notes = Vec::new();
    for (i, comp) in comps.iter().enumerate() {
        let mut order: Vec<usize> = (0..comp.alphabet_size()).collect();
        let norm = |u: usize| comp.control_value(u).unwrap().iter().map(|v| v * v).sum::<f64>();
        order.sort_by(|&a, &b| norm(a).total_cmp(&norm(b)).then(a.cmp(&b)));
        let joint_of = |ui: usize| {
            let mut parts = neutral.clone();
            parts[i] = ui;
            system.join_control(&parts).unwrap() as u32
        };
        let joint: Vec<u32> = order.iter().map(|&u| joint_of(u)).collect();

        let mut pool = vec![ControlWord::constant(neutral[i] as u32, tau)];
        let mut covered = BitSet::new(elements.len());
        let mark = |w: &ControlWord, covered: &mut BitSet| {
            let jw = ControlWord::new(w.entries.iter().map(|&u| joint_of(u as usize)).collect());
            let mut mask = covered.clone();
            mask = complement(&mask);
            covered.union_with(&stay_set_masked(system, region, &elements, &jw, &mask));
        };
        mark(&pool[0], &mut covered);
        let mut failed = 0usize;
        for e in 0..elements.len() {
            if covered.contains(e) {
                continue;
            }
            if pool.len() >= search.max_pool {
                notes.push(format!("component {i}: pool capped at {} words", search.max_pool));
                break;
            }
            let mut budget = search.node_budget;
            let mut path = Vec::with_capacity(tau);
            if dfs(system, region, elements.point(e), tau, &order, &joint, &mut path, &mut budget) {
                let w = ControlWord::new(path.iter().map(|&k| order[k] as u32).collect());
                mark(&w, &mut covered);
                if !pool.contains(&w) {
                    pool.push(w);
                }
            } else {
                failed += 1;
                // keep the loop from retrying it
                covered.insert(e);
            }
        }
        if failed > 0 {
            notes.push(format!("component {i}: no word found for {failed} grid points with the others neutral"));
        }
        pools.push(pool);
    }
    Ok((pools, notes))
}

fn complement(s: &BitSet) -> BitSet {
    let mut full = BitSet::full(s.len());
    full.difference_with(s);
    full
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    system: &SystemDef,
    region: &GridRegion,
    x: &[f64],
    tau: usize,
    order: &[usize],
    joint: &[u32],
    path: &mut Vec<usize>,
    budget: &mut usize,
) -> bool {
    if path.len() == tau {
        return true;
    }
    let mut next = vec![0.0; x.len()];
    for k in 0..order.len() {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        system.step_into(x, joint[k] as usize, &mut next);
        if region.in_interior(&next) {
            path.push(k);
            if dfs(system, region, &next, tau, order, joint, path, budget) {
                return true;
            }
            path.pop();
        }
    }
    false
}

/// Elements covered by the product family.
pub fn product_family_coverage(
    system: &SystemDef,
    region: &GridRegion,
    elements: &GridElements,
    family: &[Vec<ControlWord>],
) -> Result<BitSet> {
    if family.len() != system.component_count() {
        return Err(Error::Dimension { expected: system.component_count(), got: family.len() });
    }
    let mut covered = BitSet::new(elements.len());
    if family.iter().any(Vec::is_empty) {
        return Ok(covered);
    }
    let mut idx = vec![0usize; family.len()];
    let mut parts: Vec<ControlWord> = Vec::with_capacity(family.len());
    loop {
        parts.clear();
        parts.extend(idx.iter().zip(family).map(|(&k, s)| s[k].clone()));
        let joint = ControlWord::from_components(system, &parts)?;
        let mask = complement(&covered);
        covered.union_with(&stay_set_masked(system, region, elements, &joint, &mask));
        if covered.is_full() {
            return Ok(covered);
        }
        let mut k = family.len();
        loop {
            if k == 0 {
                return Ok(covered);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < family[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Pair coverage over element classes: elements no pair distinguishes are
/// merged, since a family covers one iff it covers the other.
struct PairTable {
    n1: usize,
    n2: usize,
    /// `cov[a * n2 + b]` over classes.
    cov: Vec<BitSet>,
    n_classes: usize,
}

impl PairTable {
    fn build(
        system: &SystemDef,
        region: &GridRegion,
        elements: &GridElements,
        pools: &[Vec<ControlWord>],
        exec: &dyn Executor,
    ) -> Result<Self> {
        let (p1, p2) = (&pools[0], &pools[1]);
        let (n1, n2) = (p1.len(), p2.len());
        let tau = p1[0].len();
        let mut keyed = Vec::with_capacity(n1 * n2);
        for (a, wa) in p1.iter().enumerate() {
            for (b, wb) in p2.iter().enumerate() {
                let j = ControlWord::from_components(system, &[wa.clone(), wb.clone()])?;
                keyed.push((j, a * n2 + b));
            }
        }
        keyed.sort();
        let words: Vec<ControlWord> = keyed.iter().map(|(w, _)| w.clone()).collect();
        let pool = CandidatePool::from_words(system.alphabet_size(), tau, &words)?;
        let mut raw = vec![BitSet::new(elements.len()); n1 * n2];
        for (k, set) in pool_coverage(system, region, elements, &pool, exec) {
            raw[keyed[k as usize].1] = set;
        }

        let n = elements.len();
        let mut sig = vec![BitSet::new(n1 * n2); n];
        for (p, set) in raw.iter().enumerate() {
            for e in set.iter() {
                sig[e].insert(p);
            }
        }
        let uncovered: Vec<usize> = (0..n).filter(|&e| sig[e].is_empty()).collect();
        if !uncovered.is_empty() {
            return Err(Error::NotInvariant { uncovered, total: n });
        }
        let mut classes: Vec<BitSet> = sig.clone();
        classes.sort();
        classes.dedup();
        let mut cov = vec![BitSet::new(classes.len()); n1 * n2];
        for (c, s) in classes.iter().enumerate() {
            for p in s.iter() {
                cov[p].insert(c);
            }
        }
        Ok(PairTable { n1, n2, cov, n_classes: classes.len() })
    }

    fn pair(&self, a: usize, b: usize, flip: bool) -> &BitSet {
        if flip { &self.cov[b * self.n2 + a] } else { &self.cov[a * self.n2 + b] }
    }

    fn lead_len(&self, flip: bool) -> usize {
        if flip { self.n2 } else { self.n1 }
    }

    fn follow_len(&self, flip: bool) -> usize {
        if flip { self.n1 } else { self.n2 }
    }

    /// Follower sets induced by a lead set.
    fn follower_sets(&self, lead: &[usize], flip: bool) -> Vec<BitSet> {
        (0..self.follow_len(flip))
            .map(|b| {
                let mut s = BitSet::new(self.n_classes);
                for &a in lead {
                    s.union_with(self.pair(a, b, flip));
                }
                s
            })
            .collect()
    }

    fn greedy_follow(&self, lead: &[usize], flip: bool) -> Option<usize> {
        let sets = self.follower_sets(lead, flip);
        let g = greedy_cover(&sets, self.n_classes);
        let mut u = BitSet::new(self.n_classes);
        for &i in &g {
            u.union_with(&sets[i]);
        }
        u.is_full().then_some(g.len())
    }

    fn exact_follow(&self, lead: &[usize], flip: bool) -> Option<Vec<usize>> {
        let inst = CoverInstance::new(self.n_classes, self.follower_sets(lead, flip));
        min_cover(&inst, CoverMode::Exact).ok().map(|s| s.chosen)
    }

    fn potential(&self, a: usize, flip: bool) -> BitSet {
        let mut s = BitSet::new(self.n_classes);
        for b in 0..self.follow_len(flip) {
            s.union_with(self.pair(a, b, flip));
        }
        s
    }
}

/// Remove dominated and repeated points; sort by the first size.
pub fn pareto_filter(mut points: Vec<FrontierPoint>) -> Vec<FrontierPoint> {
    points.sort_by(|a, b| a.sizes.cmp(&b.sizes));
    points.dedup_by(|b, a| a.sizes == b.sizes);
    let keep: Vec<bool> = points
        .iter()
        .map(|p| {
            !points.iter().any(|q| q.sizes != p.sizes && q.sizes.iter().zip(&p.sizes).all(|(x, y)| x <= y))
        })
        .collect();
    points.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}

/// Frontier of product spanning families drawn from the given pools.
pub fn frontier(
    system: &SystemDef,
    region: &GridRegion,
    pools: &[Vec<ControlWord>],
    opts: &FrontierOptions,
    exec: &dyn Executor,
) -> Result<EntropyFrontier> {
    let n = system.component_count();
    if pools.len() != n {
        return Err(Error::Dimension { expected: n, got: pools.len() });
    }
    if pools.iter().any(Vec::is_empty) {
        return Err(Error::Config("every component needs a nonempty candidate pool".into()));
    }
    let tau = pools[0][0].len();
    if pools.iter().flatten().any(|w| w.len() != tau) {
        return Err(Error::Config("candidate words have different horizons".into()));
    }
    let mut pools: Vec<Vec<ControlWord>> = pools.to_vec();
    for p in &mut pools {
        let mut seen = Vec::with_capacity(p.len());
        p.retain(|w| if seen.contains(w) { false } else { seen.push(w.clone()); true });
    }
    let elements = region.discretize()?;
    if n != 2 {
        return greedy_removal(system, region, &elements, &pools, tau);
    }

    let table = PairTable::build(system, region, &elements, &pools, exec)?;
    let mut diagnostics = Vec::new();
    let small = elements.len() <= EXACT_MAX_ELEMENTS && pools.iter().all(|p| p.len() <= EXACT_MAX_POOL);
    if opts.exact && !small {
        diagnostics.push(format!(
            "exact enumeration needs at most {EXACT_MAX_ELEMENTS} grid points and {EXACT_MAX_POOL} words per pool; using the sweep"
        ));
    }
    let witness = |lead: &[usize], follow: &[usize], flip: bool| -> FrontierPoint {
        let (s1, s2) = if flip { (follow, lead) } else { (lead, follow) };
        let w1 = s1.iter().map(|&k| pools[0][k].clone()).collect();
        let w2 = s2.iter().map(|&k| pools[1][k].clone()).collect();
        FrontierPoint::new(tau, vec![w1, w2])
    };

    let mut points = Vec::new();
    let exact = opts.exact && small;
    if exact {
        for mask in 1u32..(1 << table.n1) {
            let lead: Vec<usize> = (0..table.n1).filter(|&a| mask & (1 << a) != 0).collect();
            if let Some(f) = table.exact_follow(&lead, false) {
                points.push(witness(&lead, &f, false));
            }
        }
    } else {
        for flip in [false, true] {
            sweep(&table, flip, opts, &mut points, &mut diagnostics, &witness);
        }
    }
    if points.is_empty() {
        return Err(Error::Infeasible { uncovered: Vec::new() });
    }
    Ok(EntropyFrontier { tau, points: pareto_filter(points), exact, diagnostics })
}

fn sweep(
    table: &PairTable,
    flip: bool,
    opts: &FrontierOptions,
    points: &mut Vec<FrontierPoint>,
    diagnostics: &mut Vec<String>,
    witness: &dyn Fn(&[usize], &[usize], bool) -> FrontierPoint,
) {
    let lead_n = table.lead_len(flip);
    let record = |lead: &[usize], points: &mut Vec<FrontierPoint>| -> Option<usize> {
        let f = table.exact_follow(lead, flip)?;
        let m2 = f.len();
        let mut sorted = lead.to_vec();
        sorted.sort_unstable();
        points.push(witness(&sorted, &f, flip));
        Some(m2)
    };

    // anchor: fewest lead words that can cover every class at all
    let pots: Vec<BitSet> = (0..lead_n).map(|a| table.potential(a, flip)).collect();
    if let Ok(sol) = min_cover(&CoverInstance::new(table.n_classes, pots.clone()), CoverMode::Exact) {
        record(&sol.chosen, points);
    }

    // budget 1: every single word
    let mut best: Option<(usize, usize)> = None;
    for a in 0..lead_n {
        if let Some(m) = table.greedy_follow(&[a], flip) {
            if best.is_none_or(|(bm, _)| m < bm) {
                best = Some((m, a));
            }
        }
    }
    let mut lead = match best {
        Some((_, a)) => vec![a],
        None => {
            diagnostics.push(format!("orientation {}: no single lead word admits a cover", flip as u8));
            // start from the anchor instead
            match min_cover(&CoverInstance::new(table.n_classes, pots.clone()), CoverMode::Greedy) {
                Ok(s) => vec![s.chosen[0]],
                Err(_) => return,
            }
        }
    };
    let mut current = record(&lead, points);

    while lead.len() < lead_n {
        if current == Some(1) {
            break;
        }
        // extend by the word that most reduces the greedy follower count,
        // then by coverage potential, then by index
        let mut pick: Option<((usize, usize), usize)> = None;
        let mut cover = BitSet::new(table.n_classes);
        for &a in &lead {
            cover.union_with(&pots[a]);
        }
        for a in (0..lead_n).filter(|a| !lead.contains(a)) {
            let mut trial = lead.clone();
            trial.push(a);
            let m = table.greedy_follow(&trial, flip).unwrap_or(usize::MAX);
            let gain = pots[a].count() - pots[a].intersection_count(&cover);
            let key = (m, usize::MAX - gain);
            if pick.is_none_or(|(k, _)| key < k) {
                pick = Some((key, a));
            }
        }
        let Some((_, a)) = pick else { break };
        lead.push(a);

        // bounded local swaps
        let mut evals = 0;
        let mut score = table.greedy_follow(&lead, flip).unwrap_or(usize::MAX);
        'swaps: loop {
            for pos in 0..lead.len() {
                for cand in 0..lead_n {
                    if lead.contains(&cand) {
                        continue;
                    }
                    if evals >= opts.swap_budget {
                        break 'swaps;
                    }
                    evals += 1;
                    let old = core::mem::replace(&mut lead[pos], cand);
                    let m = table.greedy_follow(&lead, flip).unwrap_or(usize::MAX);
                    if m < score {
                        score = m;
                        continue 'swaps;
                    }
                    lead[pos] = old;
                }
            }
            break;
        }
        current = record(&lead, points);
    }
}

/// Upper-bound frontier for more than two components: start from the full
/// pools and, for each rotation of the component order, drop words one
/// component at a time while the family still covers, recording a point
/// after each component.
fn greedy_removal(
    system: &SystemDef,
    region: &GridRegion,
    elements: &GridElements,
    pools: &[Vec<ControlWord>],
    tau: usize,
) -> Result<EntropyFrontier> {
    let n = pools.len();
    if !product_family_coverage(system, region, elements, pools)?.is_full() {
        return Err(Error::Infeasible { uncovered: Vec::new() });
    }
    let mut points = Vec::new();
    for start in 0..n {
        let mut family = pools.to_vec();
        for step in 0..n {
            let c = (start + step) % n;
            let mut k = family[c].len();
            while k > 0 && family[c].len() > 1 {
                k -= 1;
                let removed = family[c].remove(k);
                if !product_family_coverage(system, region, elements, &family)?.is_full() {
                    family[c].insert(k, removed);
                }
            }
            points.push(FrontierPoint::new(tau, family.clone()));
        }
    }
    Ok(EntropyFrontier {
        tau,
        points: pareto_filter(points),
        exact: false,
        diagnostics: vec![String::from("more than two components: greedy removal sweep, upper bound only")],
    })
}

/// Pairwise concatenation of two witnesses; verified on the grid at `2τ`.
pub fn concat_midpoint(system: &SystemDef, region: &GridRegion, a: &FrontierPoint, b: &FrontierPoint) -> Result<FrontierPoint> {
    let tau = a.tau();
    if b.tau() != tau || a.witness.len() != b.witness.len() {
        return Err(Error::Config("midpoint needs witnesses of equal horizon and arity".into()));
    }
    let family: Vec<Vec<ControlWord>> =
        a.witness.iter().zip(&b.witness).map(|(x, y)| super::entropy::concat_words(x, y)).collect();
    let elements = region.discretize()?;
    let cov = product_family_coverage(system, region, &elements, &family)?;
    if !cov.is_full() {
        return Err(Error::Verification(format!(
            "concatenated family leaves {} of {} grid points uncovered at horizon {}",
            elements.len() - cov.count(),
            elements.len(),
            2 * tau
        )));
    }
    Ok(FrontierPoint::new(2 * tau, family))
}
