//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Oracles are computed here from first principles (direct trajectory
//! evaluation, subset enumeration, hand-built canonical forms) rather
//! than through the library paths under test.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use invarion_core::channel::{
    build_codebook, max_independent_set, zero_error_capacity_bounds, Channel, Graph,
};
use invarion_core::closed_loop::{
    build_network_strategy, fixed_word_strategy, simulate, Adversary, StrategyOptions,
};
use invarion_core::linear::{
    apply_to_components, brunovsky, controllability, rectangular_entropy_set, transform_region, unstable_entropy,
    block_diag, Transformation,
};
use invarion_core::span::{
    concat_midpoint, concat_words, frontier, min_cover, r_inv, r_inv_subsystem, selector_pools, CoverInstance,
    CoverMode, FrontierOptions, PoolSearch, SolveOptions,
};
use invarion_core::system::uniform_levels;
use invarion_core::{BitSet, ControlWord, Error, GridRegion, Matrix, Sequential, SystemDef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

fn e2s<T>(r: Result<T, Error>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn scalar(a: f64, b: f64, levels: usize) -> SystemDef {
    SystemDef::linear(Matrix::from_element(1, 1, a), Matrix::from_element(1, 1, b), uniform_levels(-1.0, 1.0, levels))
        .unwrap()
}

fn levels(count: usize) -> Vec<f64> {
    (0..count).map(|k| -1.0 + 2.0 * k as f64 / (count - 1) as f64).collect()
}

/// Every lattice point `-h + k·step` of `[-h, h]` is kept strictly within
/// `h - step` (a one-cell margin) for all steps of some word, evaluated
/// directly.
fn scalar_words_span(a: f64, us: &[f64], h: f64, n: usize, words: &[ControlWord]) -> bool {
    let step = 2.0 * h / (n - 1) as f64;
    (0..n).all(|k| {
        let x0 = -h + step * k as f64;
        words.iter().any(|w| {
            let mut x = x0;
            w.entries.iter().all(|&u| {
                x = a * x + us[u as usize];
                x.abs() < h - step
            })
        })
    })
}

// 1. linear formula on the scalar doubling map
fn linear_formula() -> Outcome {
    let start = Instant::now();
    let sys = scalar(2.0, 1.0, 33);
    let q = GridRegion::boxed(vec![-0.5], vec![0.5], &[201], None).unwrap();
    let us = levels(33);
    let mut rates = Vec::new();
    for tau in 4..=6 {
        let s = e2s(r_inv(&sys, &q, tau, &SolveOptions::default(), &Sequential))?;
        ensure(scalar_words_span(2.0, &us, 0.5, 201, &s.words), || format!("tau {tau}: words do not span"))?;
        let rate = (s.cardinality as f64).log2() / tau as f64;
        ensure((0.9..=1.4).contains(&rate), || format!("tau {tau}: rate {rate} outside [0.9, 1.4]"))?;
        rates.push(rate);
    }
    ensure(rates[2] <= rates[0] + 0.05, || format!("tau 6 rate {} exceeds tau 4 rate {} + 0.05", rates[2], rates[0]))?;
    let h = e2s(unstable_entropy(&Matrix::from_element(1, 1, 2.0)))?;
    ensure(h == 1.0, || format!("unstable_entropy = {h}"))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!("rates tau=4..6 {:.4} {:.4} {:.4}, closed form {h}, {:.1?}", rates[0], rates[1], rates[2], start.elapsed()))
}

fn sync_system() -> (SystemDef, GridRegion) {
    let c = || SystemDef::circle(2, uniform_levels(-1.0, 1.0, 33)).unwrap();
    let sys = SystemDef::product(vec![c(), c()]).unwrap();
    let q = GridRegion::circle_band(0.1, &[256, 256], None).unwrap();
    (sys, q)
}

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn wrap(x: f64) -> f64 {
    x.rem_euclid(1.0)
}

/// Component `i` plays `word`; the other component greedily picks the
/// control that brings it closest to the first. Greedy success is a
/// sufficient witness that the grid point is covered.
fn tracking_covers(word: &ControlWord, i: usize) -> bool {
    let us = levels(33);
    let (delta, eps) = (0.1, 1.0 / 256.0);
    (0..256 * 256).all(|k| {
        let mut x = [(k / 256) as f64 / 256.0, (k % 256) as f64 / 256.0];
        if circ(x[0], x[1]) > delta + 1e-12 {
            return true;
        }
        word.entries.iter().all(|&u| {
            let lead = wrap(2.0 * x[i] + us[u as usize]);
            let other = us
                .iter()
                .map(|v| wrap(2.0 * x[1 - i] + v))
                .min_by(|p, q| circ(*p, lead).total_cmp(&circ(*q, lead)))
                .unwrap();
            x[i] = lead;
            x[1 - i] = other;
            circ(x[0], x[1]) < delta - eps
        })
    })
}

/// Every band grid point admits a joint word from the product family
/// keeping it in the margin interior; direct evaluation.
fn family_spans(family: &[Vec<ControlWord>]) -> bool {
    let us = levels(33);
    let (delta, eps) = (0.1, 1.0 / 256.0);
    (0..256 * 256).all(|k| {
        let x0 = [(k / 256) as f64 / 256.0, (k % 256) as f64 / 256.0];
        if circ(x0[0], x0[1]) > delta + 1e-12 {
            return true;
        }
        family[0].iter().any(|a| {
            family[1].iter().any(|b| {
                let mut x = x0;
                a.entries.iter().zip(&b.entries).all(|(&u, &v)| {
                    x = [wrap(2.0 * x[0] + us[u as usize]), wrap(2.0 * x[1] + us[v as usize])];
                    circ(x[0], x[1]) < delta - eps
                })
            })
        })
    })
}

// 2. synchronization trade-off
fn synchronization() -> Outcome {
    let start = Instant::now();
    let (sys, q) = sync_system();
    for tau in 1..=6 {
        for i in 0..2 {
            let s = e2s(r_inv_subsystem(&sys, &q, tau, i, &SolveOptions::default(), &Sequential))?;
            ensure(s.cardinality == 1, || format!("r_inv^({i})({tau}) = {}", s.cardinality))?;
            ensure(tracking_covers(&s.words[0], i), || format!("tau {tau}, component {i}: tracking oracle fails"))?;
        }
    }
    let (pools, _) = e2s(selector_pools(&sys, &q, 6, &PoolSearch::default()))?;
    let f = e2s(frontier(&sys, &q, &pools, &FrontierOptions::default(), &Sequential))?;
    let dist = |r: &[f64], t: [f64; 2]| (r[0] - t[0]).abs().max((r[1] - t[1]).abs());
    let near = |t: [f64; 2]| f.points.iter().filter(|p| dist(&p.rates, t) <= 0.3).min_by(|a, b| dist(&a.rates, t).total_cmp(&dist(&b.rates, t)));
    let a = near([1.0, 0.0]).ok_or("no frontier point within 0.3 of (1,0)")?;
    let b = near([0.0, 1.0]).ok_or("no frontier point within 0.3 of (0,1)")?;
    for p in [a, b] {
        ensure(family_spans(&p.witness), || format!("witness {:?} fails direct check", p.sizes))?;
    }
    let low = f.points.iter().map(|p| p.rates[0] + p.rates[1]).fold(f64::INFINITY, f64::min);
    ensure(low >= 0.8, || format!("frontier point with h1 + h2 = {low} < 0.8"))?;
    let m = e2s(concat_midpoint(&sys, &q, a, b))?;
    ensure(m.tau() == 12, || format!("midpoint horizon {}", m.tau()))?;
    ensure(family_spans(&m.witness), || "midpoint family fails direct check".into())?;
    ensure(dist(&m.rates, [0.5, 0.5]) <= 0.3, || format!("midpoint rates {:?}", m.rates))?;
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "r_inv^(i)=1 for tau<=6, {} frontier points, extremes {:?} {:?}, min h1+h2 {low:.4}, midpoint ({:.4}, {:.4}), {:.1?}",
        f.points.len(),
        a.sizes,
        b.sizes,
        m.rates[0],
        m.rates[1],
        start.elapsed()
    ))
}

/// Product-box scenarios on closed lattices: `a ∈ {-3..3}`, controls of
/// spacing 1/4, states of spacing 1/8.
fn product_scenarios() -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..3).map(|_| (rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64)).collect()
}

fn interval() -> GridRegion {
    GridRegion::boxed(vec![-0.375], vec![0.375], &[7], None).unwrap()
}

fn product_box() -> GridRegion {
    GridRegion::boxed(vec![-0.375; 2], vec![0.375; 2], &[7, 7], None).unwrap()
}

/// Minimal spanning cardinality of the scalar system by enumeration of
/// all word subsets (words of length `tau` over 9 controls).
fn brute_r_inv(a: f64, tau: usize) -> usize {
    let us = levels(9);
    let n_words = 9usize.pow(tau as u32);
    let words: Vec<ControlWord> = (0..n_words)
        .map(|mut k| {
            let mut e = vec![0u32; tau];
            for slot in e.iter_mut().rev() {
                *slot = (k % 9) as u32;
                k /= 9;
            }
            ControlWord::new(e)
        })
        .collect();
    let covers: Vec<Vec<bool>> = words
        .iter()
        .map(|w| {
            (0..7)
                .map(|k| scalar_words_span_point(a, &us, -0.375 + 0.125 * k as f64, w))
                .collect()
        })
        .collect();
    for size in 1..=7 {
        if subsets_cover(&covers, size, 0, &mut vec![false; 7]) {
            return size;
        }
    }
    usize::MAX
}

fn scalar_words_span_point(a: f64, us: &[f64], x0: f64, w: &ControlWord) -> bool {
    let mut x = x0;
    w.entries.iter().all(|&u| {
        x = a * x + us[u as usize];
        x.abs() < 0.375 - 0.125
    })
}

fn subsets_cover(covers: &[Vec<bool>], left: usize, from: usize, hit: &mut Vec<bool>) -> bool {
    if hit.iter().all(|&h| h) {
        return true;
    }
    if left == 0 {
        return false;
    }
    let first_missing = hit.iter().position(|&h| !h).unwrap();
    for j in from..covers.len() {
        if !covers[j][first_missing] {
            continue;
        }
        let saved = hit.clone();
        for (h, &c) in hit.iter_mut().zip(&covers[j]) {
            *h |= c;
        }
        if subsets_cover(covers, left - 1, 0, hit) {
            return true;
        }
        *hit = saved;
    }
    false
}

// 3. subsystem entropy on a product set equals the component's own
fn product_exactness() -> Outcome {
    let opts = SolveOptions::default();
    let mut seen = Vec::new();
    for (a1, a2) in product_scenarios() {
        let sys = SystemDef::product(vec![scalar(a1, 1.0, 9), scalar(a2, 1.0, 9)]).unwrap();
        let q = product_box();
        for tau in 1..=4 {
            for (i, a) in [(0, a1), (1, a2)] {
                let sub = e2s(r_inv_subsystem(&sys, &q, tau, i, &opts, &Sequential))?;
                let own = e2s(r_inv(&scalar(a, 1.0, 9), &interval(), tau, &opts, &Sequential))?;
                ensure(sub.cardinality == own.cardinality, || {
                    format!("a=({a1},{a2}) tau {tau} i {i}: subsystem {} vs component {}", sub.cardinality, own.cardinality)
                })?;
                if tau <= 2 {
                    let brute = brute_r_inv(a, tau);
                    ensure(own.cardinality == brute, || format!("a={a} tau {tau}: {} vs enumeration {brute}", own.cardinality))?;
                }
                seen.push(sub.cardinality);
            }
        }
    }
    Ok(format!("scenarios {:?}, cardinalities {:?}", product_scenarios(), seen))
}

// 4. sandwich and concatenation
fn sandwich() -> Outcome {
    let opts = SolveOptions::default();
    let us = levels(9);
    let mut checked = 0;
    for (a1, a2) in product_scenarios() {
        let sys = SystemDef::product(vec![scalar(a1, 1.0, 9), scalar(a2, 1.0, 9)]).unwrap();
        let q = product_box();
        let mut whole = Vec::new();
        for tau in 1..=3 {
            let w = e2s(r_inv(&sys, &q, tau, &opts, &Sequential))?;
            for i in 0..2 {
                let proj = e2s(q.project(i..i + 1))?;
                let low = e2s(r_inv(&sys.components()[i], &proj, tau, &opts, &Sequential))?;
                let mid = e2s(r_inv_subsystem(&sys, &q, tau, i, &opts, &Sequential))?;
                ensure(low.cardinality <= mid.cardinality && mid.cardinality <= w.cardinality, || {
                    format!(
                        "a=({a1},{a2}) tau {tau} i {i}: {} <= {} <= {} fails",
                        low.cardinality, mid.cardinality, w.cardinality
                    )
                })?;
                checked += 1;
            }
            whole.push(w);
        }
        let words = concat_words(&whole[0].words, &whole[1].words);
        ensure(words.len() <= whole[0].cardinality * whole[1].cardinality, || "too many concatenated words".into())?;
        // direct check at horizon 3 on the 7x7 grid
        let spans = (0..49).all(|k| {
            let x0 = [-0.375 + 0.125 * (k / 7) as f64, -0.375 + 0.125 * (k % 7) as f64];
            words.iter().any(|w| {
                let mut x = x0;
                w.entries.iter().all(|&u| {
                    let (u1, u2) = (u as usize / 9, u as usize % 9);
                    x = [a1 * x[0] + us[u1], a2 * x[1] + us[u2]];
                    x[0].abs() < 0.25 && x[1].abs() < 0.25
                })
            })
        });
        ensure(spans, || format!("a=({a1},{a2}): concatenated witness does not span at tau 3"))?;
    }
    Ok(format!("{checked} sandwich checks, 3 concatenations verified"))
}

// 5. invariance under state and feedback transformations
fn transformation_invariance() -> Outcome {
    let base = GridRegion::diagonal_band(vec![-0.5; 2], vec![0.5; 2], (0, 1), 0.25, &[17, 17], None).unwrap();
    let sys = SystemDef::product(vec![scalar(2.0, 1.0, 9), scalar(2.0, 1.0, 9)]).unwrap();
    let m = |v: f64| Matrix::from_element(1, 1, v);
    let pairs = [(2.0, 1.0, -1.0), (0.5, 2.0, 1.0), (-1.0, 4.0, -2.0)];
    let opts = SolveOptions::default();
    let mut out = Vec::new();
    for (t1, t2, f2) in pairs {
        let ts = vec![
            Some(Transformation::State { t: m(t1), v: m(1.0) }),
            Some(Transformation::Feedback { t: m(t2), v: m(1.0), f: m(f2) }),
        ];
        let tsys = e2s(apply_to_components(&sys, &ts))?;
        let p = e2s(transform_region(&sys, &base, &ts))?;
        // trajectories map coordinate-wise: y_k = T x_k
        let w = ControlWord::new(vec![3, 40, 77, 12]);
        let xs = e2s(sys.trajectory(&[0.125, -0.25], &w))?;
        let ys = e2s(tsys.trajectory(&[0.125 * t1, -0.25 * t2], &w))?;
        for (x, y) in xs.iter().zip(&ys) {
            ensure((y[0] - t1 * x[0]).abs() < 1e-12 && (y[1] - t2 * x[1]).abs() < 1e-12, || {
                format!("T=({t1},{t2}), F={f2}: trajectory {y:?} is not the image of {x:?}")
            })?;
        }
        for tau in 1..=3 {
            let rq = e2s(r_inv_subsystem(&sys, &base, tau, 0, &opts, &Sequential))?;
            let rp = e2s(r_inv_subsystem(&tsys, &p, tau, 0, &opts, &Sequential))?;
            ensure(rq.cardinality == rp.cardinality, || {
                format!("T=({t1},{t2}), F={f2}, tau {tau}: {} on Q vs {} on P", rq.cardinality, rp.cardinality)
            })?;
            out.push(rq.cardinality);
        }
    }
    Ok(format!("3 transformation pairs, r^(1) for tau=1..3: {out:?}"))
}

/// Words pairwise distinguishable: for each pair some position has
/// disjoint output sets.
fn distinguishable(relation: &[Vec<usize>], words: &[Vec<usize>]) -> bool {
    words.iter().enumerate().all(|(i, a)| {
        words[i + 1..]
            .iter()
            .all(|b| a.iter().zip(b).any(|(&x, &y)| relation[x].iter().all(|o| !relation[y].contains(o))))
    })
}

// 6. zero-error capacity
fn capacity() -> Outcome {
    let b = e2s(zero_error_capacity_bounds(&Channel::noiseless(2), 3))?;
    ensure((b.lower, b.upper) == (1.0, 1.0), || format!("noiseless binary ({}, {})", b.lower, b.upper))?;
    let b = e2s(zero_error_capacity_bounds(&Channel::all_confusable(2), 3))?;
    ensure((b.lower, b.upper) == (0.0, 0.0), || format!("all-confusable ({}, {})", b.lower, b.upper))?;
    let pent = Channel::pentagon();
    let b = e2s(zero_error_capacity_bounds(&pent, 2))?;
    let want = 0.5 * 5f64.log2();
    ensure((b.lower - want).abs() <= 1e-9, || format!("pentagon lower {} vs {want}", b.lower))?;
    let book = e2s(build_codebook(&pent, 2, 5))?;
    let relation: Vec<Vec<usize>> = (0..5).map(|s| vec![s, (s + 1) % 5]).collect();
    ensure(book.len() == 5 && book.words.iter().all(|w| w.len() == 2), || "codebook shape".into())?;
    ensure(distinguishable(&relation, &book.words), || format!("codebook {:?} not distinguishable", book.words))?;
    Ok(format!("noiseless (1, 1), confusable (0, 0), pentagon lower {:.12} upper {:.6}, codebook {:?}", b.lower, b.upper, book.words))
}

// 7. data-rate theorem end to end
fn data_rate() -> Outcome {
    let start = Instant::now();
    let (sys, q) = sync_system();
    let elements = e2s(q.discretize())?;
    let (pools, _) = e2s(selector_pools(&sys, &q, 6, &PoolSearch::default()))?;
    let f = e2s(frontier(&sys, &q, &pools, &FrontierOptions::default(), &Sequential))?;
    let point = f.points.iter().find(|p| p.sizes[1] == 1).ok_or("no frontier point with |S2| = 1")?;
    // 4 symbols, pairs {0,1} and {2,3} confusable: 1 bit per use
    let four = Channel::new(4, vec![vec![0, 1], vec![1], vec![2, 3], vec![3]]).unwrap();
    let one = Channel::noiseless(1);
    let links = [four.clone(), one.clone()];
    let st = e2s(build_network_strategy(&sys, &q, point, &links, &StrategyOptions::default()))?;
    let resolutions = four.resolutions(16).unwrap();
    ensure(resolutions.len() == 4, || "expected 4 resolutions".into())?;
    let mut runs = 0;
    for e in (0..elements.len()).step_by(97) {
        for r in &resolutions {
            let adv = [Adversary::Fixed(r.clone()), Adversary::Fixed(vec![0])];
            let t = e2s(simulate(&sys, &q, &elements, &st, &adv, 10_000, elements.point(e)))?;
            ensure(t.ok, || format!("escape from {:?} at step {:?} under {r:?}", elements.point(e), t.first_escape))?;
            ensure(t.decode_errors == 0, || "decoder mismatch".into())?;
            ensure(t.used_rate[0] <= t.codebook_rate[0] + 1e-12, || "used rate above codebook rate".into())?;
            // the transcript's own states, rechecked: strictly inside the band
            ensure(t.states[1..].iter().all(|x| circ(x[0], x[1]) < 0.1), || "transcript state outside Q".into())?;
            runs += 1;
        }
    }
    let limited = build_network_strategy(&sys, &q, point, &links, &StrategyOptions { codebook_limit: Some(point.sizes[0] - 1) });
    ensure(matches!(limited, Err(Error::CapacityInsufficient { .. })), || format!("forced small codebook: {limited:?}"))?;

    // zero capacity: the decoder learns nothing, so each link repeats one word
    let dead = [Channel::all_confusable(2), Channel::all_confusable(2)];
    let every_point_fails = f.points.iter().all(|p| {
        matches!(build_network_strategy(&sys, &q, p, &dead, &StrategyOptions::default()), Err(Error::CapacityInsufficient { .. }))
    });
    ensure(every_point_fails, || "a frontier point was encodable over zero-capacity channels".into())?;
    let mut worst = 0;
    for u1 in 0..33u32 {
        for u2 in 0..33u32 {
            let words = vec![ControlWord::constant(u1, 6), ControlWord::constant(u2, 6)];
            let st = e2s(fixed_word_strategy(words, &dead, elements.len()))?;
            let adv = [Adversary::Fixed(vec![0, 0]), Adversary::Fixed(vec![0, 0])];
            let escape = (0..elements.len()).find_map(|e| {
                let t = simulate(&sys, &q, &elements, &st, &adv, 200, elements.point(e)).ok()?;
                t.first_escape
            });
            let step = escape.ok_or_else(|| format!("fixed controls ({u1}, {u2}): no escape within 200 steps"))?;
            worst = worst.max(step);
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "|S|={:?}, codebooks {:?}, {runs} runs x 10^4 steps ok; limit {} fails; zero capacity: escape for all 1089 fixed words (latest first escape at step {worst}), {:.1?}",
        point.sizes,
        st.links.iter().map(|l| l.codebook.len()).collect::<Vec<_>>(),
        point.sizes[0] - 1,
        start.elapsed()
    ))
}

fn enumerate_cover(n: usize, sets: &[BitSet]) -> Option<usize> {
    (0u32..(1 << sets.len()))
        .filter(|mask| {
            let mut all = vec![false; n];
            for (j, s) in sets.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    s.iter().for_each(|e| all[e] = true);
                }
            }
            all.iter().all(|&h| h)
        })
        .map(|m| m.count_ones() as usize)
        .min()
}

fn enumerate_independence(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..(1 << n))
        .filter(|&m| edges.iter().all(|&(a, b)| m & (1 << a) == 0 || m & (1 << b) == 0))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

// 8. exact solvers against enumeration
fn solver_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut feasible = 0;
    for case in 0..50 {
        let n = rng.random_range(1..=16);
        let m = rng.random_range(1..=15);
        let sets: Vec<BitSet> = (0..m).map(|_| BitSet::from_indices(n, (0..n).filter(|_| rng.random_bool(0.3)))).collect();
        let want = enumerate_cover(n, &sets);
        let got = min_cover(&CoverInstance::new(n, sets), CoverMode::Exact).ok().map(|s| s.chosen.len());
        ensure(want == got, || format!("cover case {case}: enumeration {want:?}, solver {got:?}"))?;
        feasible += usize::from(want.is_some());
    }
    for case in 0..50 {
        let n = rng.random_range(1..=18);
        let p = rng.random_range(0.1..0.7);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.random_bool(p)).collect();
        let want = enumerate_independence(n, &edges);
        let (got, witness) = e2s(max_independent_set(&Graph::from_edges(n, &edges)))?;
        let indep = witness.iter().all(|&a| witness.iter().all(|&b| !edges.contains(&(a, b))));
        ensure(got == want && witness.len() == got && indep, || format!("graph case {case}: {got} vs {want}"))?;
    }
    Ok(format!("50 cover instances ({feasible} feasible) and 50 graphs agree with enumeration"))
}

/// Chains in input order; row `k` of a chain shifts to row `k+1`, and
/// the chain's input drives its last row.
fn canonical_oracle(indices: &[usize], m: usize) -> (Matrix, Matrix) {
    let d: usize = indices.iter().sum();
    let mut a = Matrix::zeros(d, d);
    let mut b = Matrix::zeros(d, m);
    let mut off = 0;
    for (c, &k) in indices.iter().filter(|&&k| k > 0).enumerate() {
        for r in 0..k - 1 {
            a[(off + r, off + r + 1)] = 1.0;
        }
        b[(off + k - 1, c)] = 1.0;
        off += k;
    }
    (a, b)
}

fn eig_entropy(a: &Matrix) -> f64 {
    a.complex_eigenvalues().iter().map(|l| l.re.hypot(l.im)).filter(|&r| r > 1.0 + 1e-9).map(f64::log2).sum()
}

// 9. Brunovsky forms and spectra
fn brunovsky_spectrum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut pairs = Vec::new();
    while pairs.len() < 20 {
        let d = rng.random_range(1..=4);
        let m = rng.random_range(1..=d);
        let a = Matrix::from_fn(d, d, |_, _| rng.random_range(-2.0..2.0));
        let b = Matrix::from_fn(d, m, |_, _| rng.random_range(-1.0..1.0));
        if e2s(controllability(&a, &b))?.controllable() {
            pairs.push((a, b));
        }
    }
    for (k, (a, b)) in pairs.iter().enumerate() {
        let f = e2s(brunovsky(a, b))?;
        let tinv = f.t.clone().try_inverse().ok_or("T singular")?;
        let vinv = f.v.clone().try_inverse().ok_or("V singular")?;
        let (ac, bc) = canonical_oracle(&f.indices, b.ncols());
        let r1 = (&f.t * (a + b * &f.f) * &tinv - &ac).abs().max();
        let r2 = (&f.t * b * &vinv - &bc).abs().max();
        let r3 = (&f.a_c - &ac).abs().max().max((&f.b_c - &bc).abs().max());
        worst = worst.max(r1).max(r2).max(r3);
        ensure(r1 <= 1e-8 && r2 <= 1e-8 && r3 <= 1e-8, || format!("pair {k}: residuals {r1:e} {r2:e} {r3:e}"))?;
        let h = e2s(unstable_entropy(&f.a_c))?;
        ensure(h == 0.0, || format!("pair {k}: transformed entropy {h}"))?;
    }
    for group in pairs.chunks(4) {
        let sum: f64 = e2s(rectangular_entropy_set(group))?.iter().map(|t| t.value).sum();
        let blocks: Vec<Matrix> = group.iter().map(|(a, _)| a.clone()).collect();
        let whole = e2s(unstable_entropy(&block_diag(&blocks)))?;
        let oracle = eig_entropy(&block_diag(&blocks));
        ensure((sum - whole).abs() <= 1e-6 && (whole - oracle).abs() <= 1e-6, || {
            format!("thresholds {sum}, block diagonal {whole}, eigenvalue oracle {oracle}")
        })?;
    }
    Ok(format!("20 pairs, max residual {worst:.2e}, threshold sums match in 5 groups"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("linear formula", linear_formula),
        ("synchronization trade-off", synchronization),
        ("product-set exactness", product_exactness),
        ("sandwich and concatenation", sandwich),
        ("transformation invariance", transformation_invariance),
        ("zero-error capacity", capacity),
        ("data-rate closed loop", data_rate),
        ("solver oracles", solver_oracles),
        ("Brunovsky and spectrum", brunovsky_spectrum),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
