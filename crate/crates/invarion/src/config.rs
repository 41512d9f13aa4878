//! Scenario configuration files.
//!
//! A scenario is one JSON document. Only the sections a command needs
//! have to be present; [`ScenarioConfig::validate_for`] checks them and
//! reports problems with the path of the offending field. Component,
//! axis and channel indices are 0-based.

use std::collections::BTreeMap;
use std::path::Path;

use invarion_core::channel::Channel;
use invarion_core::closed_loop::Adversary;
use invarion_core::span::{CoverMode, FrontierOptions, PoolSearch, SolveOptions, DEFAULT_POOL_CAP};
use invarion_core::system::uniform_levels;
use invarion_core::{GridRegion, Matrix, SystemDef};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub systems: Vec<SystemConfig>,
    #[serde(default)]
    pub region: Option<RegionConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub taus: Vec<usize>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Components for `subsystem-entropy`; all of them when empty.
    #[serde(default)]
    pub subsystems: Vec<usize>,
    #[serde(default)]
    pub frontier: Option<FrontierConfig>,
    #[serde(default)]
    pub channels: Vec<ChannelConfig>,
    #[serde(default)]
    pub capacity: Option<CapacityConfig>,
    #[serde(default)]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub linear: Option<LinearConfig>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemConfig {
    /// `x ↦ A x + B u`, matrices row-major.
    Linear { a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, #[serde(default)] controls: ControlsConfig },
    /// `x ↦ α x + u mod 1`.
    Circle { alpha: i64, #[serde(default)] controls: ControlsConfig },
}

/// A finite control alphabet: explicit `values`, or the product of
/// uniform grids with `levels` points on `[lower_k, upper_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlsConfig {
    #[serde(default)]
    pub values: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_lower")]
    pub lower: Vec<f64>,
    #[serde(default = "default_upper")]
    pub upper: Vec<f64>,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_lower() -> Vec<f64> {
    vec![-1.0]
}
fn default_upper() -> Vec<f64> {
    vec![1.0]
}
fn default_levels() -> usize {
    33
}

impl Default for ControlsConfig {
    fn default() -> Self {
        ControlsConfig { values: None, lower: default_lower(), upper: default_upper(), levels: default_levels() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionConfig {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{(x¹, x²) : d(x¹, x²) ≤ δ}` on the 2-torus.
    CircleBand { delta: f64 },
    Torus,
    DiagonalBand { lower: Vec<f64>, upper: Vec<f64>, axes: [usize; 2], width: f64 },
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Points per axis; a single value applies to every axis.
    pub resolution: Vec<usize>,
    /// Interior margin; one cell (the largest step) when absent.
    #[serde(default)]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub mode: CoverMode,
    #[serde(default = "default_pool_cap")]
    pub pool_cap: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub node_limit: Option<u64>,
}

fn default_pool_cap() -> usize {
    DEFAULT_POOL_CAP
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { mode: CoverMode::Exact, pool_cap: DEFAULT_POOL_CAP, seed: 0, node_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierConfig {
    pub tau: usize,
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub swap_budget: Option<usize>,
    #[serde(default)]
    pub node_budget: Option<usize>,
    #[serde(default)]
    pub max_pool: Option<usize>,
    /// Also concatenate the two extreme points and verify at `2τ`.
    #[serde(default)]
    pub midpoint: bool,
}

/// `relation` maps each input symbol to the outputs it may arrive as.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub alphabet: Vec<String>,
    pub relation: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    pub k_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryPolicy {
    Exhaustive,
    SeededRandom,
    GreedyEscape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub tau: usize,
    pub horizon: usize,
    pub adversary: AdversaryPolicy,
    /// Initial states; when empty, every `scan_stride`-th grid point.
    #[serde(default)]
    pub x0: Vec<Vec<f64>>,
    #[serde(default = "default_stride")]
    pub scan_stride: usize,
    /// Channel per component (or the single link), by index into `channels`.
    #[serde(default)]
    pub links: Vec<usize>,
    #[serde(default)]
    pub codebook_limit: Option<usize>,
    /// Resolutions enumerated by the exhaustive adversary, at most.
    #[serde(default = "default_resolution_limit")]
    pub resolution_limit: usize,
}

fn default_stride() -> usize {
    1
}
fn default_resolution_limit() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearConfig {
    /// One-step absorbing set `K` for the strong invariance check.
    #[serde(default)]
    pub absorbing: Option<RegionConfig>,
    /// Horizon and cells per unit for the volume growth check.
    #[serde(default)]
    pub volume_tau: Option<usize>,
    #[serde(default = "default_cells")]
    pub volume_cells: usize,
}

fn default_cells() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_cases")]
    pub cases: usize,
}

fn default_cases() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<String>,
}

/// A parsed config with the SHA-256 of its bytes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub hash: String,
}

pub fn parse(text: &str) -> Result<LoadedConfig, ConfigError> {
    use sha2::{Digest, Sha256};
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { String::from("<root>") } else { path }, e.into_inner().to_string())
    })?;
    let digest = Sha256::digest(text.as_bytes());
    let hash = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(LoadedConfig { config, hash })
}

pub fn load(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

fn matrix(rows: &[Vec<f64>], path: &str) -> Result<Matrix, ConfigError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(schema(path, "matrix must be a nonempty rectangular array of rows"));
    }
    Ok(Matrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl ControlsConfig {
    pub fn alphabet(&self, inputs: usize, path: &str) -> Result<Vec<Vec<f64>>, ConfigError> {
        if let Some(v) = &self.values {
            if v.is_empty() || v.iter().any(|u| u.len() != inputs) {
                return Err(schema(format!("{path}.values"), format!("need a nonempty list of {inputs}-vectors")));
            }
            return Ok(v.clone());
        }
        let widen = |v: &[f64], name: &str| -> Result<Vec<f64>, ConfigError> {
            match v.len() {
                1 => Ok(vec![v[0]; inputs]),
                n if n == inputs => Ok(v.to_vec()),
                n => Err(schema(format!("{path}.{name}"), format!("has {n} entries for {inputs} inputs"))),
            }
        };
        let (lo, hi) = (widen(&self.lower, "lower")?, widen(&self.upper, "upper")?);
        if self.levels == 0 {
            return Err(schema(format!("{path}.levels"), "must be positive"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h)) {
            return Err(schema(format!("{path}.lower"), "lower bound exceeds upper bound"));
        }
        let axes: Vec<Vec<f64>> =
            lo.iter().zip(&hi).map(|(&l, &h)| uniform_levels(l, h, self.levels).into_iter().map(|u| u[0]).collect()).collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out.iter().flat_map(|p: &Vec<f64>| axis.iter().map(move |&v| [p.as_slice(), &[v]].concat())).collect();
        }
        Ok(out)
    }
}

impl SystemConfig {
    pub fn build(&self, path: &str) -> Result<SystemDef, ConfigError> {
        match self {
            SystemConfig::Linear { a, b, controls } => {
                let a = matrix(a, &format!("{path}.a"))?;
                let b = matrix(b, &format!("{path}.b"))?;
                let alphabet = controls.alphabet(b.ncols(), &format!("{path}.controls"))?;
                SystemDef::linear(a, b, alphabet).map_err(|e| schema(path, e.to_string()))
            }
            SystemConfig::Circle { alpha, controls } => {
                let alphabet = controls.alphabet(1, &format!("{path}.controls"))?;
                SystemDef::circle(*alpha, alphabet).map_err(|e| schema(path, e.to_string()))
            }
        }
    }
}

impl RegionConfig {
    pub fn build(&self, grid: &GridConfig, dim: usize, path: &str) -> Result<GridRegion, ConfigError> {
        let res: Vec<usize> = match grid.resolution.len() {
            1 => vec![grid.resolution[0]; dim],
            n if n == dim => grid.resolution.clone(),
            n => return Err(schema("grid.resolution", format!("has {n} entries for a {dim}-dimensional state"))),
        };
        if let Some(m) = grid.margin {
            if !(m >= 0.0) {
                return Err(schema("grid.margin", "must be nonnegative"));
            }
        }
        let built = match self {
            RegionConfig::Box { lower, upper } => GridRegion::boxed(lower.clone(), upper.clone(), &res, grid.margin),
            RegionConfig::CircleBand { delta } => GridRegion::circle_band(*delta, &res, grid.margin),
            RegionConfig::Torus => GridRegion::torus(dim, &res, grid.margin),
            RegionConfig::DiagonalBand { lower, upper, axes, width } => {
                GridRegion::diagonal_band(lower.clone(), upper.clone(), (axes[0], axes[1]), *width, &res, grid.margin)
            }
            RegionConfig::Ball { center, radius } => GridRegion::ball(center.clone(), *radius, &res, grid.margin),
        };
        let region = built.map_err(|e| schema(path, e.to_string()))?;
        if region.dim() != dim {
            return Err(schema(path, format!("region is {}-dimensional, systems have state dimension {dim}", region.dim())));
        }
        Ok(region)
    }
}

impl ChannelConfig {
    pub fn build(&self, path: &str) -> Result<Channel, ConfigError> {
        let index = |s: &str, at: &str| {
            self.alphabet
                .iter()
                .position(|a| a == s)
                .ok_or_else(|| schema(at, format!("symbol {s:?} is not in the alphabet")))
        };
        let mut seen = std::collections::BTreeSet::new();
        if self.alphabet.iter().any(|a| !seen.insert(a)) || self.alphabet.is_empty() {
            return Err(schema(format!("{path}.alphabet"), "must be nonempty with distinct symbols"));
        }
        let mut relation = vec![Vec::new(); self.alphabet.len()];
        for (k, outs) in &self.relation {
            let at = format!("{path}.relation.{k}");
            let i = index(k, &at)?;
            relation[i] = outs.iter().map(|o| index(o, &at)).collect::<Result<_, _>>()?;
        }
        if let Some(i) = relation.iter().position(Vec::is_empty) {
            return Err(schema(format!("{path}.relation"), format!("symbol {:?} has no outputs", self.alphabet[i])));
        }
        Channel::new(self.alphabet.len(), relation).map_err(|e| schema(path, e.to_string()))
    }
}

/// Commands a config can be validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Entropy,
    SubsystemEntropy,
    Frontier,
    Capacity,
    LinearFormula,
    Simulate,
    Verify,
}

/// The dynamical part of a scenario, built and checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub system: SystemDef,
    pub region: GridRegion,
}

impl ScenarioConfig {
    pub fn solve_options(&self, seed: u64) -> SolveOptions {
        SolveOptions { mode: self.solver.mode, pool_cap: self.solver.pool_cap, seed, node_limit: self.solver.node_limit }
    }

    pub fn frontier_options(&self) -> (FrontierOptions, PoolSearch) {
        let f = self.frontier.clone().unwrap_or(FrontierConfig {
            tau: 1,
            exact: false,
            swap_budget: None,
            node_budget: None,
            max_pool: None,
            midpoint: false,
        });
        let mut fo = FrontierOptions { exact: f.exact, ..FrontierOptions::default() };
        if let Some(s) = f.swap_budget {
            fo.swap_budget = s;
        }
        let mut ps = PoolSearch::default();
        if let Some(n) = f.node_budget {
            ps.node_budget = n;
        }
        if let Some(m) = f.max_pool {
            ps.max_pool = m;
        }
        (fo, ps)
    }

    pub fn build_systems(&self) -> Result<Vec<SystemDef>, ConfigError> {
        if self.systems.is_empty() {
            return Err(schema("systems", "at least one system is required"));
        }
        self.systems.iter().enumerate().map(|(i, s)| s.build(&format!("systems[{i}]"))).collect()
    }

    /// The product of the configured systems and the region, with the
    /// load-time checks on the band width and the margin.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let comps = self.build_systems()?;
        let system = if comps.len() == 1 {
            comps.into_iter().next().unwrap()
        } else {
            SystemDef::product(comps).map_err(|e| schema("systems", e.to_string()))?
        };
        let region_cfg = self.region.as_ref().ok_or_else(|| schema("region", "missing"))?;
        let grid = self.grid.as_ref().ok_or_else(|| schema("grid", "missing"))?;
        let region = region_cfg.build(grid, system.state_dim(), "region")?;
        if let RegionConfig::CircleBand { delta } = region_cfg {
            for (i, s) in self.systems.iter().enumerate() {
                if let SystemConfig::Circle { alpha, .. } = s {
                    let bound = 1.0 / (2.0 * (1 - alpha).abs() as f64);
                    if *delta > bound {
                        return Err(schema(
                            "region.delta",
                            format!("{delta} exceeds the synchronization bound 1/(2|1-alpha|) = {bound} of systems[{i}]"),
                        ));
                    }
                }
            }
        }
        let half = region.half_cell_diagonal(0..region.dim());
        if region.margin() < half {
            return Err(schema(
                "grid.margin",
                format!("margin {} is below half a cell diagonal ({half}); grid certificates would not cover snapping", region.margin()),
            ));
        }
        Ok(Scenario { system, region })
    }

    pub fn build_channels(&self) -> Result<Vec<Channel>, ConfigError> {
        self.channels.iter().enumerate().map(|(i, c)| c.build(&format!("channels[{i}]"))).collect()
    }

    /// Check the sections `command` needs.
    pub fn validate_for(&self, command: Command) -> Result<(), ConfigError> {
        let taus = || -> Result<(), ConfigError> {
            if self.taus.is_empty() {
                return Err(schema("taus", "must list at least one horizon"));
            }
            if let Some(i) = self.taus.iter().position(|&t| t == 0) {
                return Err(schema(format!("taus[{i}]"), "horizons start at 1"));
            }
            Ok(())
        };
        match command {
            Command::Entropy => {
                taus()?;
                self.scenario()?;
            }
            Command::SubsystemEntropy => {
                taus()?;
                self.scenario()?;
                let n = self.systems.len();
                if n < 2 {
                    return Err(schema("systems", "subsystem entropy needs at least two components"));
                }
                if let Some(k) = self.subsystems.iter().position(|&i| i >= n) {
                    return Err(schema(format!("subsystems[{k}]"), format!("no component {} (0-based, {n} systems)", self.subsystems[k])));
                }
            }
            Command::Frontier => {
                let f = self.frontier.as_ref().ok_or_else(|| schema("frontier", "missing"))?;
                if f.tau == 0 {
                    return Err(schema("frontier.tau", "must be at least 1"));
                }
                if self.systems.len() < 2 {
                    return Err(schema("systems", "a frontier needs at least two components"));
                }
                self.scenario()?;
            }
            Command::Capacity => {
                if self.channels.is_empty() {
                    return Err(schema("channels", "at least one channel is required"));
                }
                self.build_channels()?;
                let c = self.capacity.as_ref().ok_or_else(|| schema("capacity", "missing"))?;
                if c.k_max == 0 {
                    return Err(schema("capacity.k_max", "must be at least 1"));
                }
            }
            Command::LinearFormula => {
                if self.systems.is_empty() {
                    return Err(schema("systems", "at least one system is required"));
                }
                for (i, s) in self.systems.iter().enumerate() {
                    if !matches!(s, SystemConfig::Linear { .. }) {
                        return Err(schema(format!("systems[{i}]"), "linear-formula needs linear systems"));
                    }
                    s.build(&format!("systems[{i}]"))?;
                }
                if let Some(LinearConfig { absorbing: Some(_), .. }) = &self.linear {
                    self.scenario()?;
                }
            }
            Command::Simulate => {
                let s = self.simulation.as_ref().ok_or_else(|| schema("simulation", "missing"))?;
                if s.tau == 0 {
                    return Err(schema("simulation.tau", "must be at least 1"));
                }
                if s.scan_stride == 0 {
                    return Err(schema("simulation.scan_stride", "must be at least 1"));
                }
                let sc = self.scenario()?;
                let channels = self.build_channels()?;
                let want = if self.systems.len() == 1 { 1 } else { self.systems.len() };
                if s.links.len() != want {
                    return Err(schema("simulation.links", format!("needs {want} channel indices, got {}", s.links.len())));
                }
                if let Some(k) = s.links.iter().position(|&c| c >= channels.len()) {
                    return Err(schema(format!("simulation.links[{k}]"), format!("no channel {} (0-based)", s.links[k])));
                }
                for (k, x) in s.x0.iter().enumerate() {
                    if x.len() != sc.system.state_dim() || !sc.region.contains(x) {
                        return Err(schema(format!("simulation.x0[{k}]"), "initial state is not in the region"));
                    }
                }
            }
            Command::Verify => {}
        }
        Ok(())
    }
}

impl SimulationConfig {
    /// Adversary per link for one run; `resolution` indexes the joint
    /// resolutions under the exhaustive policy.
    pub fn adversaries(&self, links: usize, seed: u64, resolution: Option<&[Vec<usize>]>) -> Vec<Adversary> {
        match (self.adversary, resolution) {
            (AdversaryPolicy::Exhaustive, Some(maps)) => maps.iter().cloned().map(Adversary::Fixed).collect(),
            (AdversaryPolicy::SeededRandom, _) | (AdversaryPolicy::Exhaustive, None) => {
                (0..links).map(|l| Adversary::SeededRandom(seed.wrapping_add(l as u64))).collect()
            }
            (AdversaryPolicy::GreedyEscape, _) => vec![Adversary::GreedyEscape; links],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"{
        "systems": [{"type": "linear", "a": [[2]], "b": [[1]]}],
        "region": {"type": "box", "lower": [-0.5], "upper": [0.5]},
        "grid": {"resolution": [201]},
        "taus": [1, 2]
    }"#;

    #[test]
    fn parses_and_validates() {
        let c = parse(LINEAR).unwrap();
        c.config.validate_for(Command::Entropy).unwrap();
        assert_eq!(c.hash.len(), 64);
        let sc = c.config.scenario().unwrap();
        assert_eq!(sc.system.alphabet_size(), 33);
        assert_eq!(sc.region.margin(), 0.005);
    }

    #[test]
    fn empty_taus_rejected() {
        let text = LINEAR.replace("[1, 2]", "[]");
        let err = parse(&text).unwrap().config.validate_for(Command::Entropy).unwrap_err();
        assert!(err.to_string().starts_with("taus:"), "{err}");
    }

    #[test]
    fn schema_errors_carry_paths() {
        let text = LINEAR.replace("\"a\": [[2]]", "\"a\": [[\"x\"]]");
        let err = parse(&text).unwrap_err();
        // internally tagged variants report the path of the tagged object
        assert!(err.to_string().starts_with("systems[0]"), "{err}");
        let text = LINEAR.replace("\"taus\"", "\"tau\"");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn band_width_and_margin_checked() {
        let text = r#"{
            "systems": [{"type": "circle", "alpha": 4}, {"type": "circle", "alpha": 2}],
            "region": {"type": "circle-band", "delta": 0.2},
            "grid": {"resolution": [64]},
            "taus": [1]
        }"#;
        let err = parse(text).unwrap().config.scenario().unwrap_err();
        assert!(err.to_string().starts_with("region.delta"), "{err}");
        let text = text.replace("0.2", "0.1").replace("[64]}", "[64], \"margin\": 0.001}");
        let err = parse(&text).unwrap().config.scenario().unwrap_err();
        assert!(err.to_string().starts_with("grid.margin"), "{err}");
    }

    #[test]
    fn channel_symbols_resolve() {
        let ch = ChannelConfig {
            alphabet: vec!["a".into(), "b".into()],
            relation: [("a".into(), vec!["a".into(), "b".into()]), ("b".into(), vec!["b".into()])].into(),
        };
        let c = ch.build("channels[0]").unwrap();
        assert!(c.confusable(0, 1));
        let bad = ChannelConfig { relation: [("a".into(), vec!["z".into()])].into(), ..ch };
        assert!(bad.build("channels[0]").unwrap_err().to_string().contains("relation.a"));
    }

    #[test]
    fn product_controls() {
        let c = ControlsConfig { values: None, lower: vec![-1.0], upper: vec![1.0], levels: 3 };
        let a = c.alphabet(2, "x").unwrap();
        assert_eq!(a.len(), 9);
        assert_eq!(a[1], vec![-1.0, 0.0]);
    }
}
