//! Self-contained verification suite: re-derives the fast-path results
//! (closed forms, recursions, tridiagonal solves, policy iteration, the
//! L1-ball maximizer) through the deliberately slow oracle routes and
//! reports one pass/fail line per check. Backs the `verify` CLI subcommand;
//! a mismatch is the strongest signal the build is wrong, so the CLI turns
//! any failure into its own exit code.

use crate::analytics;
use crate::fixtures::{self, RandomSpecRange};
use crate::mdp::MdpSpec;
use crate::oracle;
use crate::planner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Outcome of one named dual-route comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub name: String,
    pub cases: usize,
    pub mismatches: usize,
    /// Worst observed discrepancy, in the units of the check's tolerance.
    pub worst_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl VerifyCheck {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

impl fmt::Display for VerifyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({} cases, worst error {:.2e} vs tolerance {:.0e}{})",
            if self.passed() { "ok  " } else { "FAIL" },
            self.name,
            self.cases,
            self.worst_error,
            self.tolerance,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", self.detail)
            }
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(VerifyCheck::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(f, "{check}")?;
        }
        write!(
            f,
            "{}: {}/{} checks passed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.iter().filter(|c| c.passed()).count(),
            self.checks.len()
        )
    }
}

struct CheckBuilder {
    name: String,
    cases: usize,
    mismatches: usize,
    worst_error: f64,
    tolerance: f64,
    detail: String,
}

impl CheckBuilder {
    fn new(name: &'static str, tolerance: f64) -> Self {
        CheckBuilder {
            name: name.to_string(),
            cases: 0,
            mismatches: 0,
            worst_error: 0.0,
            tolerance,
            detail: String::new(),
        }
    }

    /// Records one case with the given error; errors above the tolerance
    /// count as mismatches and remember a context string.
    fn case(&mut self, error: f64, context: impl Fn() -> String) {
        self.cases += 1;
        if error > self.worst_error || error.is_nan() {
            self.worst_error = error;
        }
        if !(error <= self.tolerance) {
            self.mismatches += 1;
            if self.detail.is_empty() {
                self.detail = format!("first mismatch: {}", context());
            }
        }
    }

    fn fail(&mut self, context: String) {
        self.cases += 1;
        self.mismatches += 1;
        self.worst_error = f64::INFINITY;
        if self.detail.is_empty() {
            self.detail = format!("first mismatch: {context}");
        }
    }

    fn finish(self) -> VerifyCheck {
        VerifyCheck {
            name: self.name,
            cases: self.cases,
            mismatches: self.mismatches,
            worst_error: self.worst_error,
            tolerance: self.tolerance,
            detail: self.detail,
        }
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn sample_specs(count: usize, range: &RandomSpecRange, seed: u64) -> Vec<MdpSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| fixtures::random_spec(&mut rng, range))
        .collect()
}

fn check_stationary_measures(small: bool) -> VerifyCheck {
    let mut check = CheckBuilder::new("stationary measure: detailed balance vs power iteration", 1e-9);
    let specs = sample_specs(if small { 6 } else { 30 }, &RandomSpecRange::desk(), 101);
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for spec in &specs {
        let mut policies = vec![spec.idle_policy(), spec.full_speed_policy()];
        policies.push(fixtures::random_policy(&mut rng, spec));
        for policy in &policies {
            let fast = match planner::stationary_measure(spec, policy) {
                Ok(m) => m,
                Err(e) => {
                    check.fail(format!("{}: {e}", spec.label()));
                    continue;
                }
            };
            let slow = match oracle::power_iteration_measure(&spec.dense_kernel(policy)) {
                Ok(m) => m,
                Err(e) => {
                    check.fail(format!("{}: {e}", spec.label()));
                    continue;
                }
            };
            let error = fast
                .probs
                .iter()
                .zip(slow.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            check.case(error, || format!("{} policy {policy:?}", spec.label()));
        }
    }
    // The closed form for the idle law is a third route.
    for spec in &specs {
        let closed = analytics::idle_stationary_closed_form(spec).unwrap();
        let direct = planner::stationary_measure(spec, &spec.idle_policy()).unwrap();
        let error = closed
            .probs
            .iter()
            .zip(direct.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        check.case(error, || format!("closed form on {}", spec.label()));
    }
    check.finish()
}

fn check_hitting_times(small: bool) -> VerifyCheck {
    let mut check =
        CheckBuilder::new("hitting times: product recursion vs tridiagonal vs dense solve", 1e-8);
    let specs = sample_specs(if small { 6 } else { 30 }, &RandomSpecRange::desk(), 103);
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for spec in &specs {
        let policy = fixtures::random_policy(&mut rng, spec);
        let tri = match analytics::hitting_times(spec, &policy, 0) {
            Ok(h) => h,
            Err(e) => {
                check.fail(format!("{}: {e}", spec.label()));
                continue;
            }
        };
        let recursion = analytics::hitting_times_to_empty_recursion(spec, &policy).unwrap();
        let dense =
            oracle::expected_hitting_dense(&spec.dense_kernel(&policy), 0).unwrap();
        let mut error = 0.0f64;
        for s in 0..spec.num_states() {
            error = error.max(relative_gap(tri.expected_times[s], recursion[s]));
            error = error.max(relative_gap(tri.expected_times[s], dense[s]));
        }
        check.case(error, || format!("{} policy {policy:?}", spec.label()));
    }
    check.finish()
}

fn check_diameter(small: bool) -> VerifyCheck {
    let mut check = CheckBuilder::new("diameter: extremal recursion vs brute enumeration", 1e-6);
    let specs = sample_specs(
        if small { 4 } else { 10 },
        &RandomSpecRange::enumerable(),
        105,
    );
    for spec in &specs {
        let fast = match analytics::diameter(spec) {
            Ok(d) => d,
            Err(e) => {
                check.fail(format!("{}: {e}", spec.label()));
                continue;
            }
        };
        let slow = match oracle::enumerate_diameter(spec) {
            Ok(d) => d,
            Err(e) => {
                check.fail(format!("{}: {e}", spec.label()));
                continue;
            }
        };
        check.case(relative_gap(fast.value.linear(), slow), || {
            format!("{}", spec.label())
        });
    }
    check.finish()
}

fn check_inner_max(small: bool) -> VerifyCheck {
    // Grid resolution bounds how closely the oracle can approach the true
    // maximizer; the check is that the fast path is never *below* the grid
    // by more than the grid's own resolution.
    let step = 0.01;
    let mut check = CheckBuilder::new("L1-ball maximizer: sorted shift vs grid search", 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let instances = if small { 300 } else { 3_000 };
    for _ in 0..instances {
        use rand::Rng;
        let width = rng.random_range(2..=3usize);
        let mut p: Vec<f64> = (0..width).map(|_| rng.random::<f64>()).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        let u: Vec<f64> = (0..width).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
        let eps: f64 = 2.0 * rng.random::<f64>();
        let q = crate::ucrl2::inner_max(&p, eps, &u);
        let value: f64 = q.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
        let (_, grid_value) = oracle::grid_inner_max(&p, eps, &u, step);
        let u_norm = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let shortfall = (grid_value - step * u_norm - value).max(0.0);
        check.case(shortfall, || format!("p {p:?} eps {eps} u {u:?}"));
    }
    check.finish()
}

fn check_policy_iteration(small: bool) -> VerifyCheck {
    let mut check =
        CheckBuilder::new("optimal gain: policy iteration vs exhaustive enumeration", 1e-8);
    let specs = sample_specs(
        if small { 3 } else { 8 },
        &RandomSpecRange::enumerable(),
        107,
    );
    for spec in &specs {
        let fast = match planner::optimal_policy(spec) {
            Ok(s) => s,
            Err(e) => {
                check.fail(format!("{}: {e}", spec.label()));
                continue;
            }
        };
        let policies = oracle::all_policies(spec).unwrap();
        let mut best = f64::NEG_INFINITY;
        for policy in &policies {
            // Oracle route for the gain: power-iteration measure weighted by
            // mean rewards, no bias equation involved.
            let measure = oracle::power_iteration_measure(&spec.dense_kernel(policy)).unwrap();
            let gain: f64 = measure
                .iter()
                .enumerate()
                .map(|(s, m)| m * spec.mean_reward(s, policy[s]))
                .sum();
            best = best.max(gain);
        }
        check.case(relative_gap(fast.gain, best), || {
            format!("{}: planner {} vs enumerated {}", spec.label(), fast.gain, best)
        });
    }
    check.finish()
}

fn check_tail_dominance(small: bool) -> VerifyCheck {
    let mut check = CheckBuilder::new(
        "stationary tails: every policy dominated by the idle law",
        1e-12,
    );
    let specs = sample_specs(if small { 5 } else { 20 }, &RandomSpecRange::desk(), 108);
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for spec in &specs {
        let idle = planner::stationary_measure(spec, &spec.idle_policy()).unwrap();
        let idle_tails = oracle::tail_sums(&idle.probs);
        for _ in 0..3 {
            let policy = fixtures::random_policy(&mut rng, spec);
            let measure = planner::stationary_measure(spec, &policy).unwrap();
            let tails = oracle::tail_sums(&measure.probs);
            let excess = tails
                .iter()
                .zip(idle_tails.iter())
                .map(|(t, i)| t - i)
                .fold(0.0f64, f64::max);
            check.case(excess.max(0.0), || format!("{} policy {policy:?}", spec.label()));
        }
    }
    check.finish()
}

fn check_bellman_residuals(small: bool) -> VerifyCheck {
    let mut check = CheckBuilder::new(
        "gain and bias: Bellman residual of the tridiagonal solve",
        1e-9,
    );
    let specs = sample_specs(if small { 6 } else { 30 }, &RandomSpecRange::wide(), 110);
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    for spec in &specs {
        let policy = fixtures::random_policy(&mut rng, spec);
        match planner::gain_and_bias(spec, &policy) {
            Ok(solution) => check.case(solution.max_bellman_residual, || {
                format!("{} policy {policy:?}", spec.label())
            }),
            Err(e) => check.fail(format!("{}: {e}", spec.label())),
        }
    }
    check.finish()
}

/// Runs every dual-route check; `small` trades coverage for speed (seconds
/// instead of tens of seconds).
pub fn run_suite(small: bool) -> VerifyReport {
    VerifyReport {
        checks: vec![
            check_stationary_measures(small),
            check_hitting_times(small),
            check_diameter(small),
            check_inner_max(small),
            check_policy_iteration(small),
            check_tail_dominance(small),
            check_bellman_residuals(small),
        ],
    }
}
