//! The experiment commands.
//!
//! Each command returns its artifacts in memory; the caller writes them
//! once the command has succeeded.

use anyhow::{anyhow, bail, Context as _, Result};
use invarion_core::channel::{build_codebook, zero_error_capacity_bounds, CapacityBounds, Channel, Codebook};
use invarion_core::closed_loop::{
    build_network_strategy, build_strategy, simulate, BlockCodingStrategy, StrategyOptions, Transcript,
};
use invarion_core::linear::{
    brunovsky, controllability, rectangular_entropy_set, spectrum, strong_invariance_failures, unstable_entropy,
    volume_growth_rate, block_diag, Eigenvalue, Threshold,
};
use invarion_core::span::{
    concat_midpoint, entropy_estimate, frontier, r_inv, r_inv_subsystem, selector_pools, verify_spanning,
    verify_subsystem, EntropyEstimate, EntropyFrontier, FrontierPoint, SpanningSolution,
};
use invarion_core::{Error as CoreError, Matrix, SystemKind};
use serde::{Deserialize, Serialize};

use crate::config::{AdversaryPolicy, Command, LoadedConfig, Scenario, ScenarioConfig};
use crate::output::{fmt_f64, to_json, to_json_lines, Artifacts, Provenance, Record, Table};
use crate::parallel::RayonExecutor;
use crate::verify::{scenario_suite, solver_suites, SuiteResult};

pub struct Context {
    pub loaded: LoadedConfig,
    /// Effective pool seed (config value unless overridden).
    pub seed: u64,
    pub exec: RayonExecutor,
}

impl Context {
    fn config(&self) -> &ScenarioConfig {
        &self.loaded.config
    }

    fn provenance(&self) -> Provenance {
        Provenance { config_hash: self.loaded.hash.clone(), seed: self.seed }
    }

    fn record<T: Serialize>(&self, command: &str, result: T) -> Result<String> {
        Ok(to_json(&Record { command: command.into(), provenance: self.provenance(), result })?)
    }
}

pub struct Outcome {
    pub summary: String,
    pub artifacts: Artifacts,
    /// False when a property check failed (the command itself ran).
    pub success: bool,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Entropy => "entropy",
            Command::SubsystemEntropy => "subsystem-entropy",
            Command::Frontier => "frontier",
            Command::Capacity => "capacity",
            Command::LinearFormula => "linear-formula",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
        }
    }
}

pub fn run(command: Command, ctx: &Context) -> Result<Outcome> {
    ctx.config().validate_for(command)?;
    match command {
        Command::Entropy => entropy(ctx),
        Command::SubsystemEntropy => subsystem_entropy(ctx),
        Command::Frontier => frontier_cmd(ctx),
        Command::Capacity => capacity(ctx),
        Command::LinearFormula => linear_formula(ctx),
        Command::Simulate => simulate_cmd(ctx),
        Command::Verify => verify(ctx),
    }
}

fn ok(summary: String, artifacts: Artifacts) -> Result<Outcome> {
    Ok(Outcome { summary, artifacts, success: true })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    /// `None` for whole-system spanning sets.
    pub component: Option<usize>,
    pub solutions: Vec<SpanningSolution>,
    pub estimate: EntropyEstimate,
}

fn entropy_table() -> Table {
    Table::new(["tau", "component", "cardinality", "rate", "pool_size", "pool_sampled", "optimal"])
}

fn entropy_row(t: &mut Table, s: &SpanningSolution) {
    t.push(vec![
        s.tau.to_string(),
        s.component.map_or_else(String::new, |c| c.to_string()),
        s.cardinality.to_string(),
        fmt_f64(s.rate()),
        s.pool_size.to_string(),
        s.pool_sampled.to_string(),
        s.optimal.to_string(),
    ]);
}

fn describe(s: &SpanningSolution) -> String {
    let what = s.component.map_or_else(|| String::from("r_inv"), |c| format!("r_inv^({c})"));
    let sampled = if s.pool_sampled { ", sampled pool" } else { "" };
    let proof = if s.optimal { "" } else { ", not proven minimal" };
    format!("{what}(tau={}) = {}  rate {:.6} bits/step  (pool {}{sampled}{proof})\n", s.tau, s.cardinality, s.rate(), s.pool_size)
}

fn estimate_of(sols: &[SpanningSolution]) -> Result<EntropyEstimate> {
    Ok(entropy_estimate(&sols.iter().map(|s| (s.tau, s.cardinality)).collect::<Vec<_>>())?)
}

fn entropy(ctx: &Context) -> Result<Outcome> {
    let cfg = ctx.config();
    let Scenario { system, region } = cfg.scenario()?;
    let opts = cfg.solve_options(ctx.seed);
    let mut sols = Vec::new();
    let mut summary = String::new();
    let mut table = entropy_table();
    for &tau in &cfg.taus {
        let s = r_inv(&system, &region, tau, &opts, &ctx.exec).with_context(|| format!("tau {tau}"))?;
        verify_spanning(&system, &region, &s.words).with_context(|| format!("certificate at tau {tau}"))?;
        summary.push_str(&describe(&s));
        entropy_row(&mut table, &s);
        sols.push(s);
    }
    let estimate = estimate_of(&sols)?;
    summary.push_str(&format!("estimate: {:.6} bits/step (smallest finite-horizon rate)\n", estimate.best));
    let mut a = Artifacts::default();
    a.add("entropy.json", ctx.record("entropy", EntropyResult { component: None, solutions: sols, estimate })?);
    a.add("entropy.csv", table.render(&ctx.provenance())?);
    ok(summary, a)
}

fn subsystem_entropy(ctx: &Context) -> Result<Outcome> {
    let cfg = ctx.config();
    let Scenario { system, region } = cfg.scenario()?;
    let opts = cfg.solve_options(ctx.seed);
    let comps: Vec<usize> =
        if cfg.subsystems.is_empty() { (0..system.component_count()).collect() } else { cfg.subsystems.clone() };
    let mut results = Vec::new();
    let mut summary = String::new();
    let mut table = entropy_table();
    for &i in &comps {
        let mut sols = Vec::new();
        for &tau in &cfg.taus {
            let s = r_inv_subsystem(&system, &region, tau, i, &opts, &ctx.exec)
                .with_context(|| format!("component {i}, tau {tau}"))?;
            verify_subsystem(&system, &region, i, &s.words).with_context(|| format!("certificate, component {i}, tau {tau}"))?;
            summary.push_str(&describe(&s));
            entropy_row(&mut table, &s);
            sols.push(s);
        }
        let estimate = estimate_of(&sols)?;
        summary.push_str(&format!("component {i} estimate: {:.6} bits/step\n", estimate.best));
        results.push(EntropyResult { component: Some(i), solutions: sols, estimate });
    }
    let mut a = Artifacts::default();
    a.add("subsystem-entropy.json", ctx.record("subsystem-entropy", results)?);
    a.add("subsystem-entropy.csv", table.render(&ctx.provenance())?);
    ok(summary, a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierResult {
    pub frontier: EntropyFrontier,
    pub pool_sizes: Vec<usize>,
    pub pool_notes: Vec<String>,
    pub midpoint: Option<FrontierPoint>,
}

/// The points with the smallest first and smallest last rate.
pub fn extreme_points(points: &[FrontierPoint]) -> Option<(&FrontierPoint, &FrontierPoint)> {
    let by = |k: usize| {
        points.iter().min_by(|p, q| {
            let (a, b) = (p.rates[k], q.rates[k]);
            a.total_cmp(&b).then_with(|| p.log_family_size().total_cmp(&q.log_family_size()))
        })
    };
    let last = points.first()?.rates.len() - 1;
    Some((by(last)?, by(0)?))
}

fn frontier_cmd(ctx: &Context) -> Result<Outcome> {
    let cfg = ctx.config();
    let fc = cfg.frontier.as_ref().expect("validated");
    let Scenario { system, region } = cfg.scenario()?;
    let (fopts, search) = cfg.frontier_options();
    let (pools, pool_notes) = selector_pools(&system, &region, fc.tau, &search)?;
    let f = frontier(&system, &region, &pools, &fopts, &ctx.exec)?;
    let n = system.component_count();
    let mut summary = format!("frontier at tau={}: {} points{}\n", f.tau, f.points.len(), if f.exact { " (exact)" } else { "" });
    let header: Vec<String> = std::iter::once("tau".to_string())
        .chain((0..n).map(|i| format!("h_{i}")))
        .chain((0..n).map(|i| format!("size_{i}")))
        .chain(std::iter::once("kind".to_string()))
        .collect();
    let mut table = Table::new(header);
    let row = |p: &FrontierPoint, kind: &str| -> Vec<String> {
        std::iter::once(p.tau().to_string())
            .chain(p.rates.iter().map(|&r| fmt_f64(r)))
            .chain(p.sizes.iter().map(usize::to_string))
            .chain(std::iter::once(kind.to_string()))
            .collect()
    };
    for p in &f.points {
        summary.push_str(&format!("  sizes {:?}  rates {:?}\n", p.sizes, p.rates.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()));
        table.push(row(p, "point"));
    }
    let midpoint = if fc.midpoint {
        let (a, b) = extreme_points(&f.points).ok_or_else(|| anyhow!("empty frontier"))?;
        let m = concat_midpoint(&system, &region, a, b)?;
        summary.push_str(&format!("midpoint at tau={}: sizes {:?}, verified\n", m.tau(), m.sizes));
        table.push(row(&m, "midpoint"));
        Some(m)
    } else {
        None
    };
    for d in f.diagnostics.iter().chain(&pool_notes) {
        summary.push_str(&format!("note: {d}\n"));
    }
    let pool_sizes = pools.iter().map(Vec::len).collect();
    let mut a = Artifacts::default();
    a.add("frontier.json", ctx.record("frontier", FrontierResult { frontier: f, pool_sizes, pool_notes, midpoint })?);
    a.add("frontier.csv", table.render(&ctx.provenance())?);
    ok(summary, a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelCapacity {
    pub channel: usize,
    pub bounds: CapacityBounds,
    /// A distinguishable codebook at the block length attaining `lower`.
    pub codebook: Codebook,
}

fn capacity(ctx: &Context) -> Result<Outcome> {
    let cfg = ctx.config();
    let k_max = cfg.capacity.as_ref().expect("validated").k_max;
    let channels = cfg.build_channels()?;
    let mut table = Table::new(["channel", "k", "alpha", "clique_cover", "lower", "upper"]);
    let mut summary = String::new();
    let mut results = Vec::new();
    for (c, ch) in channels.iter().enumerate() {
        let bounds = zero_error_capacity_bounds(ch, k_max).with_context(|| format!("channel {c}"))?;
        for b in &bounds.per_k {
            table.push(vec![
                c.to_string(),
                b.k.to_string(),
                b.alpha.map_or_else(String::new, |a| a.to_string()),
                b.clique_cover.to_string(),
                b.lower.map_or_else(String::new, fmt_f64),
                fmt_f64(b.upper),
            ]);
        }
        let best = bounds
            .per_k
            .iter()
            .filter_map(|b| Some((b.lower?, b.k, b.alpha?)))
            .fold(None::<(f64, usize, usize)>, |acc, x| match acc {
                Some(a) if a.0 >= x.0 => Some(a),
                _ => Some(x),
            })
            .expect("at least one exact block length");
        let codebook = build_codebook(ch, best.1, best.2)?;
        codebook.verify(ch)?;
        summary.push_str(&format!(
            "channel {c}: {:.6} <= C0 <= {:.6} bits/use; codebook of {} words at block length {}\n",
            bounds.lower,
            bounds.upper,
            codebook.len(),
            best.1
        ));
        for d in &bounds.diagnostics {
            summary.push_str(&format!("  note: {d}\n"));
        }
        results.push(ChannelCapacity { channel: c, bounds, codebook });
    }
    let mut a = Artifacts::default();
    a.add("capacity.json", ctx.record("capacity", results)?);
    a.add("capacity.csv", table.render(&ctx.provenance())?);
    ok(summary, a)
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrunovskyRecord {
    pub indices: Vec<usize>,
    pub t: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
    pub a_c: Vec<Vec<f64>>,
    pub b_c: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearComponent {
    pub component: usize,
    pub spectrum: Vec<Eigenvalue>,
    pub threshold: Threshold,
    pub controllability_indices: Vec<usize>,
    pub brunovsky: Option<BrunovskyRecord>,
    /// Growth rate of lattice cells under the dynamics, when requested.
    pub volume_growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearResult {
    pub components: Vec<LinearComponent>,
    pub threshold_sum: f64,
    pub block_diagonal_entropy: f64,
    /// Grid points of `Q` not sent into `K` in one step.
    pub absorption_failures: Option<Vec<usize>>,
}

fn linear_formula(ctx: &Context) -> Result<Outcome> {
    let cfg = ctx.config();
    let systems = cfg.build_systems()?;
    let pairs: Vec<(Matrix, Matrix)> = systems
        .iter()
        .map(|s| match s.kind() {
            SystemKind::Linear { a, b } => (a.clone(), b.clone()),
            _ => unreachable!("validated"),
        })
        .collect();
    let thresholds = rectangular_entropy_set(&pairs)?;
    let lin = cfg.linear.clone();
    let mut table = Table::new(["component", "threshold", "controllable"]);
    let mut summary = String::new();
    let mut comps = Vec::new();
    for (i, ((a, b), th)) in pairs.iter().zip(thresholds).enumerate() {
        let cont = controllability(a, b)?;
        let bf = if cont.controllable() {
            let f = brunovsky(a, b)?;
            Some(BrunovskyRecord {
                indices: f.indices.clone(),
                t: rows(&f.t),
                v: rows(&f.v),
                f: rows(&f.f),
                a_c: rows(&f.a_c),
                b_c: rows(&f.b_c),
            })
        } else {
            None
        };
        let volume_growth = match lin.as_ref().and_then(|l| l.volume_tau.map(|t| (t, l.volume_cells))) {
            Some((t, cells)) => Some(volume_growth_rate(a, t, cells)?),
            None => None,
        };
        summary.push_str(&format!("component {i}: threshold {} bits/step{}\n", th.value, if th.controllable { "" } else { " (not controllable)" }));
        for w in &th.warnings {
            summary.push_str(&format!("  warning: {w}\n"));
        }
        table.push(vec![i.to_string(), fmt_f64(th.value), th.controllable.to_string()]);
        comps.push(LinearComponent {
            component: i,
            spectrum: spectrum(a)?,
            threshold: th,
            controllability_indices: cont.indices,
            brunovsky: bf,
            volume_growth,
        });
    }
    let threshold_sum: f64 = comps.iter().map(|c| c.threshold.value).sum();
    let blocks: Vec<Matrix> = pairs.iter().map(|(a, _)| a.clone()).collect();
    let block_diagonal_entropy = unstable_entropy(&block_diag(&blocks))?;
    summary.push_str(&format!("sum of thresholds {threshold_sum}, block-diagonal entropy {block_diagonal_entropy}\n"));
    let absorption_failures = match lin.as_ref().and_then(|l| l.absorbing.clone()) {
        Some(k_cfg) => {
            let sc = cfg.scenario()?;
            let grid = cfg.grid.as_ref().expect("scenario checked");
            let k = k_cfg.build(grid, sc.system.state_dim(), "linear.absorbing")?;
            let fails = strong_invariance_failures(&sc.system, &sc.region, &k)?;
            summary.push_str(&format!("one-step absorption into K: {} grid points fail\n", fails.len()));
            Some(fails)
        }
        None => None,
    };
    let result = LinearResult { components: comps, threshold_sum, block_diagonal_entropy, absorption_failures };
    let mut a = Artifacts::default();
    a.add("linear.json", ctx.record("linear-formula", result)?);
    a.add("linear.csv", table.render(&ctx.provenance())?);
    ok(summary, a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub x0: Vec<f64>,
    /// Per-link resolution maps under the exhaustive policy.
    pub resolution: Option<Vec<Vec<usize>>>,
    pub ok: bool,
    pub first_escape: Option<usize>,
    pub decode_errors: usize,
    pub words_used: Vec<usize>,
    pub used_rate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub tau: usize,
    pub horizon: usize,
    pub word_counts: Vec<usize>,
    pub codebook_sizes: Vec<usize>,
    pub codebook_rate: Vec<f64>,
    pub runs: Vec<RunSummary>,
    pub ok: bool,
}

/// One line of `transcript.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TranscriptLine {
    Step {
        step: usize,
        state: Vec<f64>,
        /// Symbol sent and received on each link during this step.
        sent: Option<Vec<usize>>,
        received: Option<Vec<usize>>,
    },
    Summary {
        summary: RunSummary,
        config_hash: String,
        seed: u64,
    },
}

/// Strategy for the configured scenario: a spanning set for one system,
/// or the first frontier point whose word counts fit every link.
pub fn strategy_for(
    cfg: &ScenarioConfig,
    sc: &Scenario,
    channels: &[Channel],
    seed: u64,
    exec: &RayonExecutor,
) -> Result<(BlockCodingStrategy, Vec<String>)> {
    let sim = cfg.simulation.as_ref().expect("validated");
    let links: Vec<Channel> = sim.links.iter().map(|&c| channels[c].clone()).collect();
    let opts = StrategyOptions { codebook_limit: sim.codebook_limit };
    if sc.system.component_count() == 1 || cfg.systems.len() == 1 {
        let sol = r_inv(&sc.system, &sc.region, sim.tau, &cfg.solve_options(seed), exec)?;
        let st = build_strategy(&sol, &links[0], &sc.region, &opts)?;
        return Ok((st, vec![format!("spanning set of {} words at tau={}", sol.cardinality, sim.tau)]));
    }
    let (_, search) = cfg.frontier_options();
    let (fopts, _) = cfg.frontier_options();
    let (pools, _) = selector_pools(&sc.system, &sc.region, sim.tau, &search)?;
    let f = frontier(&sc.system, &sc.region, &pools, &fopts, exec)?;
    let mut last = None;
    for p in &f.points {
        match build_network_strategy(&sc.system, &sc.region, p, &links, &opts) {
            Ok(st) => return Ok((st, vec![format!("frontier point with word counts {:?} at tau={}", p.sizes, sim.tau)])),
            Err(e @ CoreError::CapacityInsufficient { .. }) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    match last {
        Some(e) => bail!("no frontier point at tau={} fits the link capacities; last attempt: {e}", sim.tau),
        None => bail!("empty frontier"),
    }
}

fn joint_resolutions(links: &[&Channel], limit: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for (l, ch) in links.iter().enumerate() {
        let rs = ch
            .resolutions(limit)
            .ok_or_else(|| anyhow!("link {l}: {} resolutions exceed the limit {limit}", ch.resolution_count()))?;
        out = out.iter().flat_map(|p| rs.iter().map(move |r| [p.clone(), vec![r.clone()]].concat())).collect();
        if out.len() > limit {
            bail!("joint resolutions exceed the limit {limit}");
        }
    }
    Ok(out)
}

fn simulate_cmd(ctx: &Context) -> Result<Outcome> {
    let cfg = ctx.config();
    let sim = cfg.simulation.as_ref().expect("validated");
    let sc = cfg.scenario()?;
    let channels = cfg.build_channels()?;
    let (strategy, notes) = strategy_for(cfg, &sc, &channels, ctx.seed, &ctx.exec)?;
    let elements = sc.region.discretize()?;
    let x0s: Vec<Vec<f64>> = if sim.x0.is_empty() {
        (0..elements.len()).step_by(sim.scan_stride).map(|e| elements.point(e).to_vec()).collect()
    } else {
        sim.x0.clone()
    };
    let link_channels: Vec<&Channel> = strategy.links.iter().map(|l| &l.channel).collect();
    let resolutions: Vec<Option<Vec<Vec<usize>>>> = match sim.adversary {
        AdversaryPolicy::Exhaustive => joint_resolutions(&link_channels, sim.resolution_limit)?.into_iter().map(Some).collect(),
        _ => vec![None],
    };
    let jobs: Vec<(usize, Option<Vec<Vec<usize>>>)> =
        (0..x0s.len()).flat_map(|i| resolutions.iter().map(move |r| (i, r.clone()))).collect();
    let nl = strategy.links.len();
    let run_one = |i: usize, r: &Option<Vec<Vec<usize>>>| -> Result<(RunSummary, Transcript)> {
        let adv = sim.adversaries(nl, ctx.seed, r.as_deref());
        let t = simulate(&sc.system, &sc.region, &elements, &strategy, &adv, sim.horizon, &x0s[i])?;
        let s = RunSummary {
            x0: x0s[i].clone(),
            resolution: r.clone(),
            ok: t.ok,
            first_escape: t.first_escape,
            decode_errors: t.decode_errors,
            words_used: t.words_used.clone(),
            used_rate: t.used_rate.clone(),
        };
        Ok((s, t))
    };
    let runs: Vec<RunSummary> =
        ctx.exec.map(&jobs, |(i, r)| run_one(*i, r).map(|(s, _)| s)).into_iter().collect::<Result<_>>()?;
    let all_ok = runs.iter().all(|s| s.ok && s.decode_errors == 0);
    // full transcript of the first failing run, else of the first run
    let shown = runs.iter().position(|s| !s.ok).unwrap_or(0);
    let (shown_summary, shown_t) = run_one(jobs[shown].0, &jobs[shown].1)?;
    let tau = strategy.tau;
    let mut lines = vec![TranscriptLine::Step { step: 0, state: shown_t.states[0].clone(), sent: None, received: None }];
    for (k, state) in shown_t.states.iter().enumerate().skip(1) {
        let b = &shown_t.blocks[(k - 1) / tau];
        let pos = (k - 1) % tau;
        lines.push(TranscriptLine::Step {
            step: k,
            state: state.clone(),
            sent: Some(b.sent.iter().map(|w| w[pos]).collect()),
            received: Some(b.received.iter().map(|w| w[pos]).collect()),
        });
    }
    lines.push(TranscriptLine::Summary { summary: shown_summary, config_hash: ctx.loaded.hash.clone(), seed: ctx.seed });

    let mut table = Table::new(
        std::iter::once("run".to_string())
            .chain((0..sc.system.state_dim()).map(|k| format!("x0_{k}")))
            .chain(["ok", "first_escape", "decode_errors"].map(String::from))
            .chain((0..nl).map(|l| format!("words_used_{l}"))),
    );
    for (k, s) in runs.iter().enumerate() {
        table.push(
            std::iter::once(k.to_string())
                .chain(s.x0.iter().map(|&v| fmt_f64(v)))
                .chain([s.ok.to_string(), s.first_escape.map_or_else(String::new, |e| e.to_string()), s.decode_errors.to_string()])
                .chain(s.words_used.iter().map(usize::to_string))
                .collect(),
        );
    }
    let escapes = runs.iter().filter(|s| !s.ok).count();
    let mut summary = String::new();
    for n in &notes {
        summary.push_str(&format!("strategy: {n}\n"));
    }
    summary.push_str(&format!(
        "codebooks {:?} over {} link(s); {} runs of {} steps, {} escaped{}\n",
        strategy.links.iter().map(|l| l.codebook.len()).collect::<Vec<_>>(),
        nl,
        runs.len(),
        sim.horizon,
        escapes,
        runs.iter().find(|s| !s.ok).map_or_else(String::new, |s| format!(
            " (first: x0 {:?} at step {})",
            s.x0,
            s.first_escape.unwrap_or(0)
        ))
    ));
    let result = SimulationResult {
        tau,
        horizon: sim.horizon,
        word_counts: strategy.word_counts(),
        codebook_sizes: strategy.links.iter().map(|l| l.codebook.len()).collect(),
        codebook_rate: shown_t.codebook_rate.clone(),
        runs,
        ok: all_ok,
    };
    let mut a = Artifacts::default();
    a.add("simulate.json", ctx.record("simulate", result)?);
    a.add("runs.csv", table.render(&ctx.provenance())?);
    a.add("transcript.jsonl", to_json_lines(lines)?);
    ok(summary, a)
}

fn verify(ctx: &Context) -> Result<Outcome> {
    let cfg = ctx.config();
    let cases = cfg.verify.as_ref().map_or(50, |v| v.cases);
    let mut results: Vec<SuiteResult> = solver_suites(cases, ctx.seed);
    if !cfg.taus.is_empty() && cfg.region.is_some() {
        let sc = cfg.scenario()?;
        results.push(scenario_suite(&sc, &cfg.taus, &cfg.solve_options(ctx.seed), &ctx.exec));
    }
    let mut table = Table::new(["suite", "cases", "failures", "passed"]);
    let mut summary = String::new();
    for r in &results {
        summary.push_str(&format!("{} {} ({} cases)\n", if r.passed() { "PASS" } else { "FAIL" }, r.name, r.cases));
        for f in r.failures.iter().take(5) {
            summary.push_str(&format!("  {f}\n"));
        }
        table.push(vec![r.name.clone(), r.cases.to_string(), r.failures.len().to_string(), r.passed().to_string()]);
    }
    let success = results.iter().all(SuiteResult::passed);
    let mut a = Artifacts::default();
    a.add("verify.json", ctx.record("verify", &results)?);
    a.add("verify.csv", table.render(&ctx.provenance())?);
    Ok(Outcome { summary, artifacts: a, success })
}
