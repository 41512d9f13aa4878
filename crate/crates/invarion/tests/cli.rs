use std::path::Path;
use std::process::Command as Process;

use invarion::commands::{run, Context, EntropyResult, FrontierResult, SimulationResult};
use invarion::config::{parse, Command};
use invarion::output::{to_json, Record};
use invarion::parallel::RayonExecutor;
use invarion_core::channel::Channel;
use invarion_core::span::{r_inv, SolveOptions};
use invarion_core::Sequential;

const DOUBLING: &str = r#"{
    "systems": [{"type": "linear", "a": [[2]], "b": [[1]], "controls": {"levels": 9}}],
    "region": {"type": "box", "lower": [-0.5], "upper": [0.5]},
    "grid": {"resolution": [33]},
    "taus": [1, 2, 3],
    "channels": [{"alphabet": ["0", "1", "2", "3"], "relation": {"0": ["0"], "1": ["1"], "2": ["2"], "3": ["3"]}}],
    "simulation": {"tau": 2, "horizon": 40, "adversary": "seeded-random", "links": [0]}
}"#;

const SYNC_SMALL: &str = r#"{
    "systems": [
        {"type": "circle", "alpha": 2, "controls": {"levels": 17}},
        {"type": "circle", "alpha": 2, "controls": {"levels": 17}}
    ],
    "region": {"type": "circle-band", "delta": 0.125},
    "grid": {"resolution": [64]},
    "taus": [1, 2],
    "frontier": {"tau": 3, "midpoint": true},
    "solver": {"seed": 5}
}"#;

fn context(text: &str, threads: usize) -> Context {
    let loaded = parse(text).unwrap();
    let seed = loaded.config.solver.seed;
    Context { loaded, seed, exec: RayonExecutor::new(threads).unwrap() }
}

#[test]
fn entropy_record_round_trips() {
    let ctx = context(DOUBLING, 2);
    let out = run(Command::Entropy, &ctx).unwrap();
    let json = out.artifacts.get("entropy.json").unwrap();
    let rec: Record<EntropyResult> = serde_json::from_str(json).unwrap();
    assert_eq!(to_json(&rec).unwrap(), json);
    assert_eq!(rec.provenance.config_hash, ctx.loaded.hash);
    let sc = ctx.loaded.config.scenario().unwrap();
    for s in &rec.result.solutions {
        let direct = r_inv(&sc.system, &sc.region, s.tau, &SolveOptions::default(), &Sequential).unwrap();
        assert_eq!(s, &direct);
    }
}

#[test]
fn frontier_and_simulation_records_round_trip() {
    let ctx = context(SYNC_SMALL, 2);
    let out = run(Command::Frontier, &ctx).unwrap();
    let json = out.artifacts.get("frontier.json").unwrap();
    let rec: Record<FrontierResult> = serde_json::from_str(json).unwrap();
    assert_eq!(to_json(&rec).unwrap(), json);
    assert!(rec.result.midpoint.is_some());

    let ctx = context(DOUBLING, 2);
    let out = run(Command::Simulate, &ctx).unwrap();
    let json = out.artifacts.get("simulate.json").unwrap();
    let rec: Record<SimulationResult> = serde_json::from_str(json).unwrap();
    assert_eq!(to_json(&rec).unwrap(), json);
    assert!(rec.result.ok);
    let lines = out.artifacts.get("transcript.jsonl").unwrap().lines().count();
    assert_eq!(lines, 40 + 2);
}

#[test]
fn outputs_identical_across_thread_counts() {
    for (text, cmds) in [
        (DOUBLING, &[Command::Entropy, Command::Simulate][..]),
        (SYNC_SMALL, &[Command::SubsystemEntropy, Command::Frontier, Command::Entropy][..]),
    ] {
        for &cmd in cmds {
            let one = run(cmd, &context(text, 1)).unwrap().artifacts;
            let four = run(cmd, &context(text, 4)).unwrap().artifacts;
            let again = run(cmd, &context(text, 4)).unwrap().artifacts;
            assert_eq!(one, four, "{cmd:?}");
            assert_eq!(four, again, "{cmd:?}");
        }
    }
}

#[test]
fn empty_tau_list_is_a_schema_error() {
    let text = DOUBLING.replace("[1, 2, 3]", "[]");
    let err = run(Command::Entropy, &context(&text, 1)).err().unwrap();
    assert!(err.to_string().starts_with("taus:"), "{err}");
}

#[test]
fn codebook_limit_below_requirement_fails() {
    let text = DOUBLING.replace("\"links\": [0]", "\"links\": [0], \"codebook_limit\": 2");
    let err = run(Command::Simulate, &context(&text, 1)).err().unwrap();
    assert!(err.to_string().contains("capacity insufficient"), "{err}");
}

#[test]
fn capacity_of_pentagon() {
    let text = r#"{
        "channels": [{"alphabet": ["a","b","c","d","e"],
            "relation": {"a": ["a","b"], "b": ["b","c"], "c": ["c","d"], "d": ["d","e"], "e": ["e","a"]}}],
        "capacity": {"k_max": 2}
    }"#;
    let out = run(Command::Capacity, &context(text, 1)).unwrap();
    let csv = out.artifacts.get("capacity.csv").unwrap();
    let row = csv.lines().nth(2).unwrap();
    assert!(row.starts_with("0,2,5,"), "{row}");
    assert_eq!(Channel::pentagon().alphabet_size(), 5);
}

fn bin(args: &[&str], dir: &Path) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_invarion")).args(args).current_dir(dir).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn binary_writes_linear_threshold_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lin.json");
    std::fs::write(&cfg, r#"{"systems": [{"type": "linear", "a": [[2]], "b": [[1]]}]}"#).unwrap();
    let (code, stdout, _) = bin(&["linear-formula", "--config", "lin.json", "--out", "o", "--threads", "1"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("o/linear.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "component,threshold,controllable,config_hash,seed");
    assert!(lines.next().unwrap().starts_with("0,1.0000000000000000e0,true,"));
    assert!(!csv.contains('\r'));
}

#[test]
fn binary_reports_field_paths_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"systems": [{"type": "linear", "a": [[2]], "b": 1}]}"#).unwrap();
    let (code, _, stderr) = bin(&["entropy", "--config", "bad.json"], dir.path());
    assert_eq!(code, 2);
    assert!(stderr.contains("systems[0]"), "{stderr}");

    std::fs::write(dir.path().join("d.json"), DOUBLING).unwrap();
    let out = Process::new(env!("CARGO_BIN_EXE_invarion"))
        .args(["entropy", "--config", "d.json", "--out", "o"])
        .env("INVARION_SEED", "42")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("o/entropy.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",42")), "{csv}");
}
