//! Property suites behind the `verify` command.
//!
//! Each suite draws seeded random instances, solves them with the library
//! and checks the answer against a direct computation.

use invarion_core::channel::{
    block_confusability_graph, build_codebook, confusability_graph, max_independent_set, strong_power,
    zero_error_capacity_bounds, Channel, Graph,
};
use invarion_core::linear::{
    block_diag, brunovsky, canonical_pair, controllability, rectangular_entropy_set, unstable_entropy,
};
use invarion_core::span::{min_cover, r_inv, r_inv_subsystem, verify_spanning, CoverInstance, CoverMode, SolveOptions};
use invarion_core::{BitSet, Executor, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Scenario;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn suite(name: &str, cases: usize, mut check: impl FnMut(usize) -> Result<(), String>) -> SuiteResult {
    let failures = (0..cases).filter_map(|i| check(i).err().map(|e| format!("case {i}: {e}"))).collect();
    SuiteResult { name: name.into(), cases, failures }
}

fn brute_cover(n: usize, sets: &[BitSet]) -> Option<usize> {
    (0u32..(1 << sets.len()))
        .filter(|mask| {
            let mut all = BitSet::new(n);
            sets.iter().enumerate().filter(|(j, _)| mask & (1 << j) != 0).for_each(|(_, s)| all.union_with(s));
            all.is_full()
        })
        .map(u32::count_ones)
        .min()
        .map(|k| k as usize)
}

fn brute_independence(g: &Graph) -> usize {
    let n = g.n();
    (0u32..(1 << n))
        .filter(|&mask| (0..n).all(|a| mask & (1 << a) == 0 || (a + 1..n).all(|b| mask & (1 << b) == 0 || !g.adjacent(a, b))))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn random_channel(rng: &mut ChaCha8Rng) -> Channel {
    let q = rng.random_range(2..=4);
    let relation = (0..q)
        .map(|s| {
            let mut outs: Vec<usize> = (0..q).filter(|_| rng.random_bool(0.3)).collect();
            if outs.is_empty() {
                outs.push(s);
            }
            outs
        })
        .collect();
    Channel::new(q, relation).expect("nonempty relation")
}

fn random_controllable(rng: &mut ChaCha8Rng) -> (Matrix, Matrix) {
    loop {
        let d = rng.random_range(1..=4);
        let m = rng.random_range(1..=d);
        let a = Matrix::from_fn(d, d, |_, _| rng.random_range(-2.0..2.0));
        let b = Matrix::from_fn(d, m, |_, _| rng.random_range(-1.0..1.0));
        if controllability(&a, &b).is_ok_and(|c| c.controllable()) {
            return (a, b);
        }
    }
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn solver_suites(cases: usize, seed: u64) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    out.push(suite("cover-vs-enumeration", cases, |_| {
        let n = rng.random_range(1..=20);
        let m = rng.random_range(1..=15);
        let sets: Vec<BitSet> =
            (0..m).map(|_| BitSet::from_indices(n, (0..n).filter(|_| rng.random_bool(0.25)))).collect();
        let inst = CoverInstance::new(n, sets.clone());
        match (brute_cover(n, &sets), min_cover(&inst, CoverMode::Exact)) {
            (Some(k), Ok(sol)) if sol.chosen.len() == k && inst.is_cover(&sol.chosen) => Ok(()),
            (None, Err(_)) => Ok(()),
            (b, s) => Err(format!("enumeration {b:?}, solver {:?}", s.map(|s| s.chosen))),
        }
    }));

    out.push(suite("independence-vs-enumeration", cases, |_| {
        let n = rng.random_range(1..=18);
        let p = rng.random_range(0.05..0.8);
        let mut g = Graph::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(p) {
                    g.add_edge(a, b);
                }
            }
        }
        let (k, w) = max_independent_set(&g).map_err(|e| e.to_string())?;
        let want = brute_independence(&g);
        if k == want && w.len() == k && g.is_independent(&w) { Ok(()) } else { Err(format!("{k} vs {want}")) }
    }));

    out.push(suite("block-graph-is-strong-power", cases, |_| {
        let ch = random_channel(&mut rng);
        let k = rng.random_range(1..=3);
        if block_confusability_graph(&ch, k) == strong_power(&confusability_graph(&ch), k) {
            Ok(())
        } else {
            Err(format!("k={k}"))
        }
    }));

    out.push(suite("codebook-decoding", cases, |_| {
        let ch = random_channel(&mut rng);
        let k = rng.random_range(1..=2);
        let alpha = max_independent_set(&block_confusability_graph(&ch, k)).map_err(|e| e.to_string())?.0;
        let book = build_codebook(&ch, k, alpha).map_err(|e| e.to_string())?;
        for r in ch.resolutions(1 << 12).unwrap_or_default() {
            for (i, w) in book.words.iter().enumerate() {
                let rx: Vec<usize> = w.iter().map(|&s| r[s]).collect();
                if book.decode(&ch, &rx) != Some(i) {
                    return Err(format!("word {i} misdecoded under {r:?}"));
                }
            }
        }
        Ok(())
    }));

    out.push(suite("brunovsky-identities", cases, |_| {
        let (a, b) = random_controllable(&mut rng);
        let f = brunovsky(&a, &b).map_err(|e| e.to_string())?;
        let tinv = f.t.clone().try_inverse().ok_or("T singular")?;
        let vinv = f.v.clone().try_inverse().ok_or("V singular")?;
        let chains: Vec<usize> = f.indices.iter().copied().filter(|&k| k > 0).collect();
        let (ac, bc) = canonical_pair(&chains, b.ncols());
        let e1 = max_abs(&(&f.t * (&a + &b * &f.f) * &tinv - &ac));
        let e2 = max_abs(&(&f.t * &b * &vinv - &bc));
        let h = unstable_entropy(&f.a_c).map_err(|e| e.to_string())?;
        if e1 < 1e-8 && e2 < 1e-8 && h == 0.0 { Ok(()) } else { Err(format!("residuals {e1:e}, {e2:e}, entropy {h}")) }
    }));

    out.push(suite("threshold-additivity", cases, |_| {
        let pairs: Vec<(Matrix, Matrix)> = (0..rng.random_range(1..=3)).map(|_| random_controllable(&mut rng)).collect();
        let sum: f64 = rectangular_entropy_set(&pairs).map_err(|e| e.to_string())?.iter().map(|t| t.value).sum();
        let blocks: Vec<Matrix> = pairs.iter().map(|(a, _)| a.clone()).collect();
        let whole = unstable_entropy(&block_diag(&blocks)).map_err(|e| e.to_string())?;
        if (sum - whole).abs() < 1e-6 { Ok(()) } else { Err(format!("{sum} vs {whole}")) }
    }));

    out.push(suite("capacity-reference-channels", 1, |_| {
        let b = zero_error_capacity_bounds(&Channel::noiseless(2), 3).map_err(|e| e.to_string())?;
        if (b.lower, b.upper) != (1.0, 1.0) {
            return Err(format!("noiseless binary: ({}, {})", b.lower, b.upper));
        }
        let b = zero_error_capacity_bounds(&Channel::all_confusable(3), 3).map_err(|e| e.to_string())?;
        if (b.lower, b.upper) != (0.0, 0.0) {
            return Err(format!("all-confusable: ({}, {})", b.lower, b.upper));
        }
        let b = zero_error_capacity_bounds(&Channel::pentagon(), 2).map_err(|e| e.to_string())?;
        if (b.lower - 0.5 * 5f64.log2()).abs() > 1e-9 {
            return Err(format!("pentagon lower bound {}", b.lower));
        }
        Ok(())
    }));
    out
}

/// Certificates and the projection/subsystem/whole ordering for the
/// configured scenario.
pub fn scenario_suite(sc: &Scenario, taus: &[usize], opts: &SolveOptions, exec: &dyn Executor) -> SuiteResult {
    let n = sc.system.component_count();
    suite("scenario-certificates", taus.len(), |k| {
        let tau = taus[k];
        let whole = r_inv(&sc.system, &sc.region, tau, opts, exec).map_err(|e| e.to_string())?;
        verify_spanning(&sc.system, &sc.region, &whole.words).map_err(|e| e.to_string())?;
        if n < 2 {
            return Ok(());
        }
        for i in 0..n {
            let mid = r_inv_subsystem(&sc.system, &sc.region, tau, i, opts, exec).map_err(|e| e.to_string())?;
            let range = sc.system.component_range(i);
            let projected = sc.region.project(range).map_err(|e| e.to_string())?;
            let low = r_inv(&sc.system.components()[i], &projected, tau, opts, exec).map_err(|e| e.to_string())?;
            let exact = low.optimal && mid.optimal && !low.pool_sampled && !mid.pool_sampled;
            if exact && low.cardinality > mid.cardinality {
                return Err(format!("tau {tau}, component {i}: projection {} > subsystem {}", low.cardinality, mid.cardinality));
            }
            if mid.optimal && !mid.pool_sampled && mid.cardinality > whole.cardinality {
                return Err(format!("tau {tau}, component {i}: subsystem {} > whole {}", mid.cardinality, whole.cardinality));
            }
        }
        Ok(())
    })
}
