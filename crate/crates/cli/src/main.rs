//! `speedscale`: solve, learn on, sweep, analyze, and verify speed-scaling
//! queue models.
//!
//! Exit codes: 0 success, 1 input validation error, 2 runtime failure,
//! 3 verification mismatch.

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use speedscale::analytics;
use speedscale::harness::{self, GridFile, HarnessError};
use speedscale::mdp::{MdpParams, MdpSpec};
use speedscale::planner;
use speedscale::ucrl2::LearnerConfig;
use speedscale::verify;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "speedscale",
    version,
    about = "Exact planning, online learning, and analytic bounds for single-queue speed-scaling models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Confidence radii with an explicit failure probability delta.
    Classic,
    /// Structure-aware radii without delta (default).
    Tweaked,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model exactly: optimal speeds, gain, and bias.
    Solve {
        /// Model parameter file (JSON).
        spec: PathBuf,
    },
    /// Run one learning experiment against a model.
    Learn {
        /// Model parameter file (JSON).
        spec: PathBuf,
        /// Number of environment steps.
        #[arg(long = "T")]
        horizon: u64,
        /// RNG seed for the environment stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Confidence-ball parametrization.
        #[arg(long, value_enum, default_value = "tweaked")]
        mode: ModeArg,
        /// Failure probability for classic mode (ignored by tweaked mode).
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated checkpoint times (must end at T); default is
        /// powers of two plus T.
        #[arg(long)]
        checkpoints: Option<String>,
        /// Write the trace as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a grid of experiments across seeds and write CSV + summaries.
    Sweep {
        /// Grid file (JSON: {"points": [{id, spec, horizon, learner}]}).
        grid: PathBuf,
        /// Seeds (independent runs) per grid point.
        #[arg(long)]
        seeds: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Master seed from which every run's seed is derived.
        #[arg(long, default_value_t = 0)]
        master_seed: u64,
    },
    /// Print the analytic constant bundle (and bounds, given a horizon).
    Analyze {
        /// Model parameter file (JSON).
        spec: PathBuf,
        /// Optional horizon at which to evaluate the regret bounds.
        #[arg(long = "T")]
        horizon: Option<u64>,
    },
    /// Re-derive the fast-path results through brute-force oracles.
    Verify {
        /// Run the quick variant (fewer random cases).
        #[arg(long)]
        small: bool,
    },
}

enum Failure {
    /// Bad inputs: malformed files, invalid parameters, inconsistent flags.
    Validation(String),
    /// The inputs were fine but the computation failed.
    Runtime(String),
    /// The verification suite found a mismatch.
    Mismatch,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Mismatch => 3,
        }
    }
}

/// Prints a line to stdout, exiting quietly if the reader hung up (for
/// example `speedscale analyze ... | head`).
fn say(text: impl std::fmt::Display) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if writeln!(lock, "{text}").is_err() {
        std::process::exit(0);
    }
}

fn classify(error: HarnessError) -> Failure {
    match error {
        HarnessError::Config(_) | HarnessError::BadCheckpoints { .. } => {
            Failure::Validation(error.to_string())
        }
        _ => Failure::Runtime(error.to_string()),
    }
}

fn load_spec(path: &Path) -> Result<MdpSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    let params: MdpParams = serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("bad model file {}: {e}", path.display())))?;
    MdpSpec::build(params)
        .map_err(|e| Failure::Validation(format!("invalid model in {}: {e}", path.display())))
}

fn learner_config(spec: &MdpSpec, mode: ModeArg, delta: Option<f64>) -> LearnerConfig {
    match mode {
        ModeArg::Tweaked => {
            if let Some(delta) = delta {
                eprintln!("note: --delta {delta} is ignored in tweaked mode");
            }
            LearnerConfig::tweaked(spec.r_max)
        }
        ModeArg::Classic => LearnerConfig::classic(spec.r_max, delta.unwrap_or(0.05)),
    }
}

fn parse_checkpoints(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|e| Failure::Validation(format!("bad checkpoint {part:?}: {e}")))
        })
        .collect()
}

fn cmd_solve(spec_path: &Path) -> Result<(), Failure> {
    let spec = load_spec(spec_path)?;
    let solution =
        planner::optimal_policy(&spec).map_err(|e| Failure::Runtime(e.to_string()))?;
    let variations = planner::bias_variations(&solution);
    say(format!("spec: {}", spec.label()));
    say(format!("gain: {}", solution.gain));
    let speeds = solution
        .policy
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    say(format!("policy: {speeds}"));
    say(format!("bias span: {}", variations.span));
    say(format!(
        "max Bellman residual: {:e}",
        solution.max_bellman_residual
    ));
    Ok(())
}

fn cmd_learn(
    spec_path: &Path,
    horizon: u64,
    seed: u64,
    mode: ModeArg,
    delta: Option<f64>,
    checkpoints: Option<String>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    if horizon == 0 {
        return Err(Failure::Validation("--T must be at least 1".into()));
    }
    let spec = load_spec(spec_path)?;
    let config = learner_config(&spec, mode, delta);
    let trace = match checkpoints {
        Some(text) => {
            let times = parse_checkpoints(&text)?;
            harness::run_with_checkpoints(&spec, config, horizon, seed, &times)
        }
        None => harness::run_experiment(&spec, config, horizon, seed),
    }
    .map_err(classify)?;

    say(format!("spec: {}", trace.spec_id));
    say(format!("seed: {seed}  T: {horizon}"));
    say(format!(
        "final realized regret: {}",
        trace.realized_regret.last().unwrap()
    ));
    say(format!(
        "final pseudo regret: {}",
        trace.pseudo_regret.last().unwrap()
    ));
    say(format!("episodes: {}", trace.k_t));
    say(format!(
        "membership failures: {}",
        trace.membership_failures
    ));
    say(format!("wall time: {:.3}s", trace.wall_time_seconds));
    if let Some(path) = out {
        harness::export_csv(std::slice::from_ref(&trace), &path).map_err(classify)?;
        say(format!("trace written to {}", path.display()));
    }
    Ok(())
}

fn cmd_sweep(grid_path: &Path, seeds: u64, out: &Path, master_seed: u64) -> Result<(), Failure> {
    let text = std::fs::read_to_string(grid_path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", grid_path.display())))?;
    let grid: GridFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("bad grid file {}: {e}", grid_path.display())))?;
    if grid.points.is_empty() {
        return Err(Failure::Validation("grid has no points".into()));
    }
    std::fs::create_dir_all(out)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out.display())))?;

    let outcome = harness::sweep(&grid.points, seeds, master_seed);
    for failure in &outcome.failures {
        eprintln!(
            "warning: point {} seed {} failed: {}",
            failure.point_id, failure.seed, failure.message
        );
    }

    let csv_path = out.join("traces.csv");
    harness::export_csv(&outcome.traces, &csv_path).map_err(classify)?;
    say(format!(
        "{} traces ({} failures) written to {}",
        outcome.traces.len(),
        outcome.failures.len(),
        csv_path.display()
    ));

    for point in &grid.points {
        let traces: Vec<_> = outcome
            .traces
            .iter()
            .filter(|t| t.spec_id == point.id)
            .cloned()
            .collect();
        if traces.len() < 2 {
            continue;
        }
        let aggregate = harness::aggregate_traces(&traces).map_err(classify)?;
        let spec = MdpSpec::build(point.spec.clone())
            .map_err(|e| Failure::Validation(format!("point {}: {e}", point.id)))?;
        let bundle =
            analytics::e2_constants(&spec).map_err(|e| Failure::Runtime(e.to_string()))?;
        let bounds = harness::bound_overlay(&spec, &bundle, &aggregate.times);
        let summary = harness::Summary {
            spec_id: point.id.clone(),
            aggregate,
            bounds,
        };
        let path = out.join(format!("summary-{}.json", point.id));
        harness::export_summary(&summary, &path).map_err(classify)?;
        say(format!(
            "summary for {} written to {}",
            point.id,
            path.display()
        ));
    }

    if !outcome.failures.is_empty() {
        let path = out.join("failures.json");
        let text = serde_json::to_string_pretty(&outcome.failures)
            .expect("failure list serialization cannot fail");
        std::fs::write(&path, text).map_err(|e| {
            Failure::Runtime(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeOutput {
    spec: String,
    bundle: analytics::AnalyticsBundle,
    #[serde(skip_serializing_if = "Option::is_none")]
    regret_bounds: Option<analytics::RegretBounds>,
}

fn cmd_analyze(spec_path: &Path, horizon: Option<u64>) -> Result<(), Failure> {
    let spec = load_spec(spec_path)?;
    if let Some(t) = horizon {
        if t < 2 {
            return Err(Failure::Validation(
                "--T must be at least 2 for the bound curves".into(),
            ));
        }
    }
    let bundle =
        analytics::e2_constants(&spec).map_err(|e| Failure::Runtime(e.to_string()))?;
    let regret_bounds = horizon.map(|t| analytics::regret_bounds(&spec, &bundle, t));
    let output = AnalyzeOutput {
        spec: spec.label(),
        bundle,
        regret_bounds,
    };
    say(serde_json::to_string_pretty(&output).expect("analytics serialization cannot fail"));
    Ok(())
}

fn cmd_verify(small: bool) -> Result<(), Failure> {
    let report = verify::run_suite(small);
    say(&report);
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { spec } => cmd_solve(&spec),
        Command::Learn {
            spec,
            horizon,
            seed,
            mode,
            delta,
            checkpoints,
            out,
        } => cmd_learn(&spec, horizon, seed, mode, delta, checkpoints, out),
        Command::Sweep {
            grid,
            seeds,
            out,
            master_seed,
        } => cmd_sweep(&grid, seeds, &out, master_seed),
        Command::Analyze { spec, horizon } => cmd_analyze(&spec, horizon),
        Command::Verify { small } => cmd_verify(small),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Validation(msg) => eprintln!("error (validation): {msg}"),
                Failure::Runtime(msg) => eprintln!("error (runtime): {msg}"),
                Failure::Mismatch => eprintln!("error: verification mismatch"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
