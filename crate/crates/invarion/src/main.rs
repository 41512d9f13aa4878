use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use invarion::commands::{run, Context};
use invarion::config::{self, Command};
use invarion::parallel::RayonExecutor;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Minimal spanning sets over the configured horizons.
    Entropy,
    /// Spanning sets counting one component's words.
    SubsystemEntropy,
    /// Finite-time network entropy points.
    Frontier,
    /// Zero-error capacity bounds of the configured channels.
    Capacity,
    /// Eigenvalue thresholds and Brunovsky forms.
    LinearFormula,
    /// Closed-loop block-coding runs.
    Simulate,
    /// Randomized property suites.
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Entropy => Command::Entropy,
            Cmd::SubsystemEntropy => Command::SubsystemEntropy,
            Cmd::Frontier => Command::Frontier,
            Cmd::Capacity => Command::Capacity,
            Cmd::LinearFormula => Command::LinearFormula,
            Cmd::Simulate => Command::Simulate,
            Cmd::Verify => Command::Verify,
        }
    }
}

/// Invariance entropy, network entropy sets and zero-error channels.
#[derive(Debug, Parser)]
#[command(name = "invarion", version)]
struct Cli {
    command: Cmd,
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output.dir` in the config, then `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "INVARION_THREADS", default_value_t = 0)]
    threads: usize,
    /// Pool seed, overriding `solver.seed`.
    #[arg(long, env = "INVARION_SEED")]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let loaded = match config::load(&cli.config) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let exec = match RayonExecutor::new(cli.threads) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    let seed = cli.seed.unwrap_or(loaded.config.solver.seed);
    let out = cli
        .out
        .or_else(|| loaded.config.output.as_ref().and_then(|o| o.dir.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Context { loaded, seed, exec };
    let outcome = match run(cli.command.into(), &ctx) {
        Ok(o) => o,
        Err(e) => {
            let prefix = if e.is::<config::ConfigError>() { "config error" } else { "error" };
            eprintln!("{prefix}: {e:#}");
            return ExitCode::from(2);
        }
    };
    print!("{}", outcome.summary);
    match outcome.artifacts.write_to(&out) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: writing {}: {e}", out.display());
            return ExitCode::from(2);
        }
    }
    if outcome.success { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
