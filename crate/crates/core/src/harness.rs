//! Seeded experiment runner: simulates the learner against the environment,
//! records regret traces at logarithmic checkpoints, sweeps grids of
//! (spec, config, horizon) points across seeds in parallel, aggregates
//! across seeds, overlays the analytic reference curves, and runs the
//! episode-structure and confidence-set diagnostics.
//!
//! Determinism contract: every output byte of a CSV is a pure function of
//! the grid and the master seed, regardless of thread scheduling.

use crate::analytics::{self, AnalyticsBundle};
use crate::mdp::MdpSpec;
use crate::planner::{self, PlannerError};
use crate::ucrl2::{ConfigError, EviError, LearnerConfig, Ucrl2Learner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("learner configuration rejected: {0}")]
    Config(#[from] ConfigError),
    #[error("planner failed on spec {spec_id}: {source}")]
    Planner {
        spec_id: String,
        source: PlannerError,
    },
    #[error("value iteration aborted in spec {spec_id}, seed {seed}, step {t}: {source}")]
    Evi {
        spec_id: String,
        seed: u64,
        t: u64,
        source: EviError,
    },
    #[error("bad checkpoint grid: {reason}")]
    BadCheckpoints { reason: String },
    #[error("traces cannot be aggregated: {reason}")]
    TraceMismatch { reason: String },
    #[error("need at least two traces to aggregate")]
    TooFewTraces,
    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed CSV at {path} line {line}: {reason}")]
    Csv {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

/// One episode as seen by the harness. The `min_count` fields record the
/// state-action pair that had the fewest lifetime visits when the episode
/// opened, and how often the episode then visited it — the inputs of the
/// worst-count diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub k: u64,
    pub t_k: u64,
    pub episode_length: u64,
    pub rho_tilde: f64,
    pub evi_iterations: usize,
    /// Whether the true model sat inside this episode's confidence ball.
    pub membership_flag: bool,
    pub min_count_pair: (usize, usize),
    pub min_count_nu: u64,
}

/// Full record of one learning run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretTrace {
    pub spec_id: String,
    pub seed: u64,
    /// Checkpoint grid: 0, the powers of two below the horizon, and the
    /// horizon itself.
    pub times: Vec<u64>,
    /// `t rho* - sum of realized rewards` at each checkpoint.
    pub realized_regret: Vec<f64>,
    /// `t rho* - sum of mean rewards of the played pairs` at each checkpoint.
    pub pseudo_regret: Vec<f64>,
    /// Episode index active at each checkpoint (0 before the first step).
    pub episode_at_checkpoint: Vec<u64>,
    pub episode_log: Vec<EpisodeRecord>,
    /// Number of episodes, `K_T`.
    pub k_t: u64,
    /// Episodes whose confidence ball missed the true model.
    pub membership_failures: u64,
    /// Per-pair `sum_k nu_k / sqrt(max(1, N_{t_k}))`, indexed `s * A + a`.
    pub visit_ratio_sums: Vec<f64>,
    /// Lifetime visit counts `N_{T+1}`, indexed `s * A + a`.
    pub final_visit_counts: Vec<u64>,
    /// How many steps were taken from each state.
    pub state_occupancy: Vec<u64>,
    /// Excluded from CSV exports; varies run to run.
    pub wall_time_seconds: f64,
}

/// Default checkpoint grid: 0, powers of two, and the horizon.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    assert!(horizon >= 1);
    let mut times = vec![0];
    let mut p = 1u64;
    while p < horizon {
        times.push(p);
        p *= 2;
    }
    times.push(horizon);
    times
}

fn validate_checkpoints(times: &[u64], horizon: u64) -> Result<(), HarnessError> {
    if times.is_empty() {
        return Err(HarnessError::BadCheckpoints {
            reason: "empty checkpoint grid".into(),
        });
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::BadCheckpoints {
            reason: "checkpoints must be strictly increasing".into(),
        });
    }
    if *times.last().unwrap() != horizon {
        return Err(HarnessError::BadCheckpoints {
            reason: format!(
                "last checkpoint {} must equal the horizon {horizon}",
                times.last().unwrap()
            ),
        });
    }
    Ok(())
}

/// Runs one learner against one environment for `horizon` steps from the
/// empty state, recording both regret flavors on the default checkpoint
/// grid. Deterministic in `seed`.
pub fn run_experiment(
    spec: &MdpSpec,
    config: LearnerConfig,
    horizon: u64,
    seed: u64,
) -> Result<RegretTrace, HarnessError> {
    run_with_checkpoints(spec, config, horizon, seed, &default_checkpoints(horizon))
}

/// [`run_experiment`] with an explicit checkpoint grid (strictly increasing,
/// ending exactly at the horizon; a leading 0 records the trivial origin).
pub fn run_with_checkpoints(
    spec: &MdpSpec,
    config: LearnerConfig,
    horizon: u64,
    seed: u64,
    times: &[u64],
) -> Result<RegretTrace, HarnessError> {
    assert!(horizon >= 1);
    validate_checkpoints(times, horizon)?;
    let spec_id = spec.label();
    let started = Instant::now();
    let rho_star = planner::optimal_policy(spec)
        .map_err(|source| HarnessError::Planner {
            spec_id: spec_id.clone(),
            source,
        })?
        .gain;

    let num_states = spec.num_states();
    let num_actions = spec.num_actions();
    let pairs = num_states * num_actions;
    let mut learner = Ucrl2Learner::new(num_states, num_actions, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut realized_sum = 0.0f64;
    let mut pseudo_sum = 0.0f64;
    let mut realized_regret = Vec::with_capacity(times.len());
    let mut pseudo_regret = Vec::with_capacity(times.len());
    let mut episode_at_checkpoint = Vec::with_capacity(times.len());
    let mut episode_log: Vec<EpisodeRecord> = Vec::new();
    let mut counts = vec![0u64; pairs];
    let mut nu = vec![0u64; pairs];
    let mut occupancy = vec![0u64; num_states];
    let mut next_checkpoint = 0usize;
    if times[0] == 0 {
        realized_regret.push(0.0);
        pseudo_regret.push(0.0);
        episode_at_checkpoint.push(0);
        next_checkpoint = 1;
    }

    let mut s = 0usize;
    for t in 1..=horizon {
        let decision =
            learner
                .next_action(s)
                .map_err(|source| HarnessError::Evi {
                    spec_id: spec_id.clone(),
                    seed,
                    t,
                    source,
                })?;
        if let Some(info) = decision.new_episode {
            if let Some(last) = episode_log.last_mut() {
                last.episode_length = t - last.t_k;
                let (ms, ma) = last.min_count_pair;
                last.min_count_nu = nu[ms * num_actions + ma];
            }
            nu.iter_mut().for_each(|c| *c = 0);
            let min_pair = counts
                .iter()
                .enumerate()
                .min_by_key(|(_, c)| **c)
                .map(|(idx, _)| (idx / num_actions, idx % num_actions))
                .unwrap();
            episode_log.push(EpisodeRecord {
                k: info.k,
                t_k: info.t_k,
                episode_length: 0,
                rho_tilde: info.rho_tilde,
                evi_iterations: info.evi_iterations,
                membership_flag: learner.membership_check(spec),
                min_count_pair: min_pair,
                min_count_nu: 0,
            });
        }
        let a = decision.action;
        let (next, reward) = spec.sample_step(s, a, &mut rng);
        learner.observe(s, a, reward, next);
        realized_sum += reward;
        pseudo_sum += spec.mean_reward(s, a);
        counts[s * num_actions + a] += 1;
        nu[s * num_actions + a] += 1;
        occupancy[s] += 1;
        if next_checkpoint < times.len() && t == times[next_checkpoint] {
            realized_regret.push(t as f64 * rho_star - realized_sum);
            pseudo_regret.push(t as f64 * rho_star - pseudo_sum);
            episode_at_checkpoint.push(learner.episode_index());
            next_checkpoint += 1;
        }
        s = next;
    }
    if let Some(last) = episode_log.last_mut() {
        last.episode_length = horizon - last.t_k + 1;
        let (ms, ma) = last.min_count_pair;
        last.min_count_nu = nu[ms * num_actions + ma];
    }

    let membership_failures = episode_log.iter().filter(|e| !e.membership_flag).count() as u64;
    let final_visit_counts: Vec<u64> = (0..num_states)
        .flat_map(|s| (0..num_actions).map(move |a| (s, a)))
        .map(|(s, a)| learner.visit_count(s, a))
        .collect();
    Ok(RegretTrace {
        spec_id,
        seed,
        times: times.to_vec(),
        realized_regret,
        pseudo_regret,
        episode_at_checkpoint,
        k_t: learner.episode_index(),
        membership_failures,
        visit_ratio_sums: learner.visit_ratio_sums(),
        final_visit_counts,
        state_occupancy: occupancy,
        episode_log,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}

/// One grid point of a sweep, as stored in grid JSON files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub id: String,
    pub spec: crate::mdp::MdpParams,
    pub horizon: u64,
    pub learner: LearnerConfig,
}

/// Top-level schema of a grid file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    pub points: Vec<GridPoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunFailure {
    pub point_id: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub traces: Vec<RegretTrace>,
    pub failures: Vec<RunFailure>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent per-run seed stream: mixing the master seed with the point
/// and run indices through splitmix64 keeps runs decorrelated while staying
/// reproducible from the three integers alone.
pub fn derive_seed(master_seed: u64, point_index: u64, run_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ point_index) ^ run_index)
}

fn run_grid_job(point: &GridPoint, point_index: u64, run_index: u64, master_seed: u64) -> Result<RegretTrace, RunFailure> {
    let seed = derive_seed(master_seed, point_index, run_index);
    let spec = MdpSpec::build(point.spec.clone()).map_err(|e| RunFailure {
        point_id: point.id.clone(),
        seed,
        message: e.to_string(),
    })?;
    run_experiment(&spec, point.learner, point.horizon, seed)
        .map(|mut trace| {
            trace.spec_id = point.id.clone();
            trace
        })
        .map_err(|e| RunFailure {
            point_id: point.id.clone(),
            seed,
            message: e.to_string(),
        })
}

fn collect_outcome(results: Vec<Result<RegretTrace, RunFailure>>) -> SweepOutcome {
    let mut outcome = SweepOutcome::default();
    for result in results {
        match result {
            Ok(trace) => outcome.traces.push(trace),
            Err(failure) => outcome.failures.push(failure),
        }
    }
    outcome
}

fn grid_jobs(points: &[GridPoint], seeds_per_point: u64) -> Vec<(usize, u64)> {
    let mut jobs = Vec::new();
    for point_index in 0..points.len() {
        for run_index in 0..seeds_per_point {
            jobs.push((point_index, run_index));
        }
    }
    jobs
}

/// Runs every (point, seed) pair in parallel. Individual failures are
/// recorded in the outcome, never fatal. Output order and content are
/// identical to [`sweep_sequential`].
pub fn sweep(points: &[GridPoint], seeds_per_point: u64, master_seed: u64) -> SweepOutcome {
    let results: Vec<_> = grid_jobs(points, seeds_per_point)
        .into_par_iter()
        .map(|(p, r)| run_grid_job(&points[p], p as u64, r, master_seed))
        .collect();
    collect_outcome(results)
}

/// Single-threaded reference implementation of [`sweep`].
pub fn sweep_sequential(
    points: &[GridPoint],
    seeds_per_point: u64,
    master_seed: u64,
) -> SweepOutcome {
    let results: Vec<_> = grid_jobs(points, seeds_per_point)
        .into_iter()
        .map(|(p, r)| run_grid_job(&points[p], p as u64, r, master_seed))
        .collect();
    collect_outcome(results)
}

/// 10/50/90 percent points of the per-checkpoint pseudo-regret sample
/// (nearest-rank).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trace_count: usize,
    pub times: Vec<u64>,
    pub mean_realized: Vec<f64>,
    pub se_realized: Vec<f64>,
    pub mean_pseudo: Vec<f64>,
    pub se_pseudo: Vec<f64>,
    pub pseudo_quantiles: Vec<Quantiles>,
    /// Least-squares slope of `ln(mean pseudo regret)` against `ln t` over
    /// the last decade of checkpoints; `None` when fewer than two positive
    /// points are available.
    pub pseudo_slope_last_decade: Option<f64>,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let idx = ((q * n as f64).ceil() as usize).saturating_sub(1).min(n - 1);
    sorted[idx]
}

/// Per-checkpoint mean, standard error, and quantiles across traces, plus
/// the log-log slope of the mean pseudo-regret over the last decade.
pub fn aggregate_traces(traces: &[RegretTrace]) -> Result<Aggregate, HarnessError> {
    if traces.len() < 2 {
        return Err(HarnessError::TooFewTraces);
    }
    let times = &traces[0].times;
    for trace in traces {
        if &trace.times != times {
            return Err(HarnessError::TraceMismatch {
                reason: format!(
                    "trace (spec {}, seed {}) uses a different checkpoint grid",
                    trace.spec_id, trace.seed
                ),
            });
        }
    }
    let mut mean_realized = Vec::with_capacity(times.len());
    let mut se_realized = Vec::with_capacity(times.len());
    let mut mean_pseudo = Vec::with_capacity(times.len());
    let mut se_pseudo = Vec::with_capacity(times.len());
    let mut pseudo_quantiles = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        let realized: Vec<f64> = traces.iter().map(|t| t.realized_regret[i]).collect();
        let pseudo: Vec<f64> = traces.iter().map(|t| t.pseudo_regret[i]).collect();
        let (mr, sr) = mean_and_se(&realized);
        let (mp, sp) = mean_and_se(&pseudo);
        mean_realized.push(mr);
        se_realized.push(sr);
        mean_pseudo.push(mp);
        se_pseudo.push(sp);
        let mut sorted = pseudo;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pseudo_quantiles.push(Quantiles {
            q10: nearest_rank(&sorted, 0.1),
            q50: nearest_rank(&sorted, 0.5),
            q90: nearest_rank(&sorted, 0.9),
        });
    }

    let horizon = *times.last().unwrap() as f64;
    let fit_points: Vec<(f64, f64)> = times
        .iter()
        .zip(mean_pseudo.iter())
        .filter(|(t, m)| **t as f64 >= horizon / 10.0 && **t >= 1 && **m > 0.0)
        .map(|(t, m)| ((*t as f64).ln(), m.ln()))
        .collect();
    let pseudo_slope_last_decade = if fit_points.len() >= 2 {
        let n = fit_points.len() as f64;
        let x_bar = fit_points.iter().map(|p| p.0).sum::<f64>() / n;
        let y_bar = fit_points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = fit_points.iter().map(|p| (p.0 - x_bar) * (p.1 - y_bar)).sum();
        let sxx: f64 = fit_points.iter().map(|p| (p.0 - x_bar).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };

    Ok(Aggregate {
        trace_count: traces.len(),
        times: times.clone(),
        mean_realized,
        se_realized,
        mean_pseudo,
        se_pseudo,
        pseudo_quantiles,
        pseudo_slope_last_decade,
    })
}

/// Worst-count diagnostic for one long episode: how often the episode
/// visited the pair that entered it with the fewest lifetime visits,
/// relative to the occupancy floor `m_top * episode_length` that long
/// episodes are predicted to achieve (reported, never asserted; the
/// prediction's premise needs astronomically long episodes).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorstCountReport {
    pub k: u64,
    pub episode_length: u64,
    pub min_count_pair: (usize, usize),
    pub nu: u64,
    /// `m_top * episode_length / 2`.
    pub predicted_floor: f64,
    /// `nu / (m_top * episode_length)`; infinite when `m_top` underflows.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeDiagnostics {
    pub k_t: u64,
    /// `S A log2(8 T / (S A))`; `None` when `T <= S A` (the bound's regime
    /// starts above one step per pair).
    pub k_t_cap: Option<f64>,
    pub k_t_within_cap: bool,
    /// Whether every pair satisfies
    /// `sum_k nu_k / sqrt(max(1, N_{t_k})) <= 3 sqrt(max(1, N_{T+1}))`.
    pub ratio_ledger_ok: bool,
    pub worst_count_reports: Vec<WorstCountReport>,
}

/// Checks the episode-count cap and the per-pair visit-ratio ledger, and
/// reports the worst-count ratio for episodes at least `min_episode_length`
/// long.
pub fn episode_diagnostics(
    trace: &RegretTrace,
    spec: &MdpSpec,
    min_episode_length: u64,
) -> Result<EpisodeDiagnostics, HarnessError> {
    let horizon = *trace.times.last().unwrap();
    let sa = (spec.num_states() * spec.num_actions()) as u64;
    let k_t_cap = if horizon > sa {
        Some(sa as f64 * (8.0 * horizon as f64 / sa as f64).log2())
    } else {
        None
    };
    let k_t_within_cap = k_t_cap.map_or(trace.k_t <= 1, |cap| (trace.k_t as f64) <= cap);

    let ratio_ledger_ok = trace
        .visit_ratio_sums
        .iter()
        .zip(trace.final_visit_counts.iter())
        .all(|(sum, n)| *sum <= 3.0 * (n.max(&1).to_owned() as f64).sqrt() + 1e-9);

    let m_top = analytics::idle_stationary_closed_form(spec)
        .map_err(|source| HarnessError::Planner {
            spec_id: trace.spec_id.clone(),
            source,
        })?
        .probs[spec.num_states() - 1];
    let worst_count_reports = trace
        .episode_log
        .iter()
        .filter(|e| e.episode_length >= min_episode_length)
        .map(|e| {
            let floor = m_top * e.episode_length as f64;
            WorstCountReport {
                k: e.k,
                episode_length: e.episode_length,
                min_count_pair: e.min_count_pair,
                nu: e.min_count_nu,
                predicted_floor: floor / 2.0,
                ratio: if floor > 0.0 {
                    e.min_count_nu as f64 / floor
                } else {
                    f64::INFINITY
                },
            }
        })
        .collect();

    Ok(EpisodeDiagnostics {
        k_t: trace.k_t,
        k_t_cap,
        k_t_within_cap,
        ratio_ledger_ok,
        worst_count_reports,
    })
}

/// Frequency of confidence-set misses at a fixed probe time across many
/// independent short runs, with the theoretical ceiling for comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipProbe {
    pub probe_time: u64,
    pub runs: u64,
    pub failures: u64,
    /// `S / (2 t^3)`, capped at 1.
    pub theoretical_bound: f64,
}

/// Runs `runs` short independent episodes of the learner and records, for
/// each probe time `t`, how often the confidence ball built from the first
/// `t - 1` observations (with episode-start radii evaluated at `t`) missed
/// the true model.
pub fn membership_failure_probe(
    spec: &MdpSpec,
    config: LearnerConfig,
    runs: u64,
    probe_times: &[u64],
    master_seed: u64,
) -> Result<Vec<MembershipProbe>, HarnessError> {
    assert!(!probe_times.is_empty());
    assert!(probe_times.windows(2).all(|w| w[0] < w[1]));
    assert!(probe_times[0] >= 1);
    let max_t = *probe_times.last().unwrap();
    let spec_id = spec.label();

    let per_run = |run: u64| -> Result<Vec<bool>, HarnessError> {
        let mut learner =
            Ucrl2Learner::new(spec.num_states(), spec.num_actions(), config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, 0, run));
        let mut s = 0usize;
        let mut misses = Vec::with_capacity(probe_times.len());
        for t in 1..=max_t {
            if probe_times.contains(&t) {
                misses.push(!learner.membership_check_now(spec));
            }
            if t == max_t {
                break;
            }
            let decision = learner.next_action(s).map_err(|source| HarnessError::Evi {
                spec_id: spec_id.clone(),
                seed: run,
                t,
                source,
            })?;
            let (next, reward) = spec.sample_step(s, decision.action, &mut rng);
            learner.observe(s, decision.action, reward, next);
            s = next;
        }
        Ok(misses)
    };

    let all: Result<Vec<Vec<bool>>, HarnessError> =
        (0..runs).into_par_iter().map(per_run).collect();
    let all = all?;
    Ok(probe_times
        .iter()
        .enumerate()
        .map(|(i, &t)| MembershipProbe {
            probe_time: t,
            runs,
            failures: all.iter().filter(|misses| misses[i]).count() as u64,
            theoretical_bound: (spec.num_states() as f64 / (2.0 * (t as f64).powi(3))).min(1.0),
        })
        .collect())
}

/// Analytic reference curves evaluated on a checkpoint grid. Entries below
/// `t = 2` are `None` (the curves involve `ln ln`-scale terms that need
/// `2 A t > 1`). The secondary and lower curves are carried as natural
/// logarithms because they overflow f64 at realistic diameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOverlay {
    pub times: Vec<u64>,
    pub upper_main: Vec<Option<f64>>,
    pub ln_upper_secondary: Vec<Option<f64>>,
    pub ln_minimax_lower: Vec<Option<f64>>,
}

/// Evaluates the three reference curves at every checkpoint.
pub fn bound_overlay(spec: &MdpSpec, bundle: &AnalyticsBundle, times: &[u64]) -> BoundOverlay {
    let mut upper_main = Vec::with_capacity(times.len());
    let mut ln_upper_secondary = Vec::with_capacity(times.len());
    let mut ln_minimax_lower = Vec::with_capacity(times.len());
    for &t in times {
        if t < 2 {
            upper_main.push(None);
            ln_upper_secondary.push(None);
            ln_minimax_lower.push(None);
        } else {
            let bounds = analytics::regret_bounds(spec, bundle, t);
            upper_main.push(Some(bounds.upper_main));
            ln_upper_secondary.push(Some(bounds.upper_secondary.ln()));
            ln_minimax_lower.push(Some(bounds.minimax_lower.ln()));
        }
    }
    BoundOverlay {
        times: times.to_vec(),
        upper_main,
        ln_upper_secondary,
        ln_minimax_lower,
    }
}

/// Cross-seed summary with the analytic overlays, written as pretty JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub spec_id: String,
    pub aggregate: Aggregate,
    pub bounds: BoundOverlay,
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Renders traces as CSV: header
/// `spec_id,seed,t,realized_regret,pseudo_regret,episode_index`, one row
/// per checkpoint per trace, LF line endings, '.' decimal separator,
/// shortest round-trip float formatting.
pub fn export_csv_string(traces: &[RegretTrace]) -> String {
    let mut out = String::from("spec_id,seed,t,realized_regret,pseudo_regret,episode_index\n");
    for trace in traces {
        debug_assert!(
            !trace.spec_id.contains([',', '\n']),
            "spec ids must stay comma- and newline-free for the CSV"
        );
        for i in 0..trace.times.len() {
            out.push_str(&format!(
                "{},{},{},{:?},{:?},{}\n",
                trace.spec_id,
                trace.seed,
                trace.times[i],
                trace.realized_regret[i],
                trace.pseudo_regret[i],
                trace.episode_at_checkpoint[i],
            ));
        }
    }
    out
}

pub fn export_csv(traces: &[RegretTrace], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, export_csv_string(traces)).map_err(io_error(path))
}

/// Reads back a CSV produced by [`export_csv`]. Only the exported columns
/// are recoverable: episode logs, visit ledgers, and wall time come back
/// empty, which is sufficient for aggregation.
pub fn import_csv(path: &Path) -> Result<Vec<RegretTrace>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    parse_csv(&text, path)
}

/// In-memory counterpart of [`import_csv`], for round-tripping exports
/// without touching the filesystem.
pub fn import_csv_string(text: &str) -> Result<Vec<RegretTrace>, HarnessError> {
    parse_csv(text, Path::new("<in-memory>"))
}

fn parse_csv(text: &str, path: &Path) -> Result<Vec<RegretTrace>, HarnessError> {
    let bad = |line: usize, reason: String| HarnessError::Csv {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header))
            if header == "spec_id,seed,t,realized_regret,pseudo_regret,episode_index" => {}
        Some((_, header)) => {
            return Err(bad(1, format!("unexpected header {header:?}")));
        }
        None => return Err(bad(1, "empty file".into())),
    }
    let mut traces: Vec<RegretTrace> = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(line_no, format!("expected 6 fields, got {}", fields.len())));
        }
        let spec_id = fields[0].to_string();
        let parse = |field: &str, what: &str| -> Result<f64, HarnessError> {
            field
                .parse::<f64>()
                .map_err(|e| bad(line_no, format!("bad {what} {field:?}: {e}")))
        };
        let seed: u64 = fields[1]
            .parse()
            .map_err(|e| bad(line_no, format!("bad seed {:?}: {e}", fields[1])))?;
        let t: u64 = fields[2]
            .parse()
            .map_err(|e| bad(line_no, format!("bad time {:?}: {e}", fields[2])))?;
        let realized = parse(fields[3], "realized regret")?;
        let pseudo = parse(fields[4], "pseudo regret")?;
        let episode: u64 = fields[5]
            .parse()
            .map_err(|e| bad(line_no, format!("bad episode index {:?}: {e}", fields[5])))?;
        let fresh = match traces.last() {
            Some(last) => last.spec_id != spec_id || last.seed != seed,
            None => true,
        };
        if fresh {
            traces.push(RegretTrace {
                spec_id,
                seed,
                times: Vec::new(),
                realized_regret: Vec::new(),
                pseudo_regret: Vec::new(),
                episode_at_checkpoint: Vec::new(),
                episode_log: Vec::new(),
                k_t: 0,
                membership_failures: 0,
                visit_ratio_sums: Vec::new(),
                final_visit_counts: Vec::new(),
                state_occupancy: Vec::new(),
                wall_time_seconds: 0.0,
            });
        }
        let trace = traces.last_mut().unwrap();
        trace.times.push(t);
        trace.realized_regret.push(realized);
        trace.pseudo_regret.push(pseudo);
        trace.episode_at_checkpoint.push(episode);
        trace.k_t = trace.k_t.max(episode);
    }
    Ok(traces)
}

pub fn export_summary(summary: &Summary, path: &Path) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(summary)
        .expect("summary serialization cannot fail");
    std::fs::write(path, text).map_err(io_error(path))
}
