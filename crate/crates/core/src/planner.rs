//! Exact average-reward planning for the birth-death class.
//!
//! Fixed-policy chains are reversible birth-death processes, so their
//! stationary laws come from detailed balance as a product of rate ratios
//! (accumulated in log space to survive large state counts). Gains are the
//! stationary average of mean rewards; biases solve the Poisson equation
//! `h = r_bar - rho + P h` pinned at `h(0) = 0`, which collapses to one
//! anchored tridiagonal solve. Optimal policies come from Howard policy
//! iteration with a deterministic tie-break (smallest speed within 1e-12 of
//! the best improvement value), which keeps runs reproducible and rules out
//! tie-induced cycling.

use crate::magnitude::ln_sum_exp;
use crate::mdp::{MdpSpec, Policy};
use crate::tridiag;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("policy has {got} entries, model has {want} states")]
    PolicyLengthMismatch { got: usize, want: usize },
    #[error("policy uses speed {speed} at state {state}, max is {max}")]
    SpeedOutOfRange {
        state: usize,
        speed: usize,
        max: usize,
    },
    #[error("chain is not irreducible (lambda = 0 or mu = 0 degenerate corner)")]
    NotIrreducible,
    #[error("Poisson-equation residual {residual} exceeds tolerance {tolerance}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("policy iteration exceeded {0} sweeps without converging")]
    IterationCapExceeded(usize),
    #[error("policy iteration revisited a previous policy (tie-break cycle)")]
    PolicyCycle,
}

/// Maximum admissible Bellman residual after the bias solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Actions closer than this to the best improvement value count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
const POLICY_ITERATION_CAP: usize = 10_000;

/// Stationary distribution of a fixed-policy chain. Probabilities are kept
/// both linearly and as natural logs: state counts in the hundreds drive
/// extreme masses below `f64` underflow, and several bound constants need
/// `ln m(s)` directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryMeasure {
    pub probs: Vec<f64>,
    pub ln_probs: Vec<f64>,
}

impl StationaryMeasure {
    /// `P(X >= s)` for every `s`.
    pub fn tails(&self) -> Vec<f64> {
        crate::oracle::tail_sums(&self.probs)
    }

    /// Expectation of a state function under the measure.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(s, p)| p * f(s))
            .sum()
    }
}

/// Gain and bias of a fixed policy, anchored at `bias[0] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub policy: Policy,
    pub gain: f64,
    pub bias: Vec<f64>,
    /// Largest Bellman residual left by the solve (diagnostic; always within
    /// [`RESIDUAL_TOLERANCE`] on success).
    pub max_bellman_residual: f64,
}

/// Successive bias differences of a solved policy.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasVariations {
    /// `bias[s] - bias[s-1]` for `s = 1..S-1`.
    pub increments: Vec<f64>,
    /// `max(bias) - min(bias)`.
    pub span: f64,
}

pub(crate) fn check_policy(spec: &MdpSpec, policy: &[usize]) -> Result<(), PlannerError> {
    if policy.len() != spec.num_states() {
        return Err(PlannerError::PolicyLengthMismatch {
            got: policy.len(),
            want: spec.num_states(),
        });
    }
    for (state, &speed) in policy.iter().enumerate() {
        if speed >= spec.num_actions() {
            return Err(PlannerError::SpeedOutOfRange {
                state,
                speed,
                max: spec.params.max_speed,
            });
        }
    }
    if !(spec.params.lambda > 0.0 && spec.params.mu > 0.0) {
        return Err(PlannerError::NotIrreducible);
    }
    Ok(())
}

/// Stationary law of the chain induced by `policy`, from detailed balance:
/// `m(s) * lambda_s = m(s+1) * (policy(s+1) + (s+1) * mu)`. The unnormalized
/// weights are accumulated as logarithms so state counts in the hundreds do
/// not underflow.
pub fn stationary_measure(
    spec: &MdpSpec,
    policy: &[usize],
) -> Result<StationaryMeasure, PlannerError> {
    check_policy(spec, policy)?;
    let n = spec.num_states();
    let mut ln_w = Vec::with_capacity(n);
    ln_w.push(0.0);
    for s in 0..n - 1 {
        let up = spec.arrival_rates[s];
        let down = spec.departure_rate(s + 1, policy[s + 1]);
        ln_w.push(ln_w[s] + up.ln() - down.ln());
    }
    let ln_norm = ln_sum_exp(&ln_w);
    let ln_probs: Vec<f64> = ln_w.iter().map(|l| l - ln_norm).collect();
    Ok(StationaryMeasure {
        probs: ln_probs.iter().map(|l| l.exp()).collect(),
        ln_probs,
    })
}

/// Gain (long-run average reward) and bias of a fixed policy. The bias
/// solves the Poisson equation with `h(0) = 0`; because the gain used on the
/// right-hand side is exact, the dropped Bellman row at state 0 is satisfied
/// automatically, and the residual check covers it.
pub fn gain_and_bias(spec: &MdpSpec, policy: &[usize]) -> Result<SolveResult, PlannerError> {
    let measure = stationary_measure(spec, policy)?;
    let n = spec.num_states();
    let rewards: Vec<f64> = (0..n).map(|s| spec.mean_reward(s, policy[s])).collect();
    let gain: f64 = measure
        .probs
        .iter()
        .zip(&rewards)
        .map(|(m, r)| m * r)
        .sum();

    let rows: Vec<_> = (0..n).map(|s| spec.transition_row(s, policy[s])).collect();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for s in 0..n {
        sub[s] = -rows[s].down;
        diag[s] = 1.0 - rows[s].stay;
        sup[s] = -rows[s].up;
        rhs[s] = rewards[s] - gain;
    }
    let bias = tridiag::solve_anchored(&sub, &diag, &sup, &rhs, 0, 0.0);

    let mut max_residual = 0.0f64;
    for s in 0..n {
        let mut expected = rows[s].stay * bias[s];
        if s > 0 {
            expected += rows[s].down * bias[s - 1];
        }
        if s + 1 < n {
            expected += rows[s].up * bias[s + 1];
        }
        let residual = rewards[s] - gain + expected - bias[s];
        max_residual = max_residual.max(residual.abs());
    }
    if max_residual > RESIDUAL_TOLERANCE {
        return Err(PlannerError::ResidualTooLarge {
            residual: max_residual,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    Ok(SolveResult {
        policy: policy.to_vec(),
        gain,
        bias,
        max_bellman_residual: max_residual,
    })
}

/// One Howard improvement sweep against the bias of the incumbent policy.
fn greedy_improvement(spec: &MdpSpec, bias: &[f64]) -> Policy {
    let n = spec.num_states();
    let mut improved = Vec::with_capacity(n);
    for s in 0..n {
        let mut best_value = f64::NEG_INFINITY;
        let mut values = Vec::with_capacity(spec.num_actions());
        for a in 0..spec.num_actions() {
            let row = spec.transition_row(s, a);
            let mut q = spec.mean_reward(s, a) + row.stay * bias[s];
            if s > 0 {
                q += row.down * bias[s - 1];
            }
            if s + 1 < n {
                q += row.up * bias[s + 1];
            }
            best_value = best_value.max(q);
            values.push(q);
        }
        let choice = values
            .iter()
            .position(|q| *q >= best_value - TIE_TOLERANCE)
            .expect("at least one action attains the maximum");
        improved.push(choice);
    }
    improved
}

/// Average-reward-optimal policy by policy iteration from the idle policy.
pub fn optimal_policy(spec: &MdpSpec) -> Result<SolveResult, PlannerError> {
    let mut policy = spec.idle_policy();
    let mut seen: HashSet<Policy> = HashSet::new();
    for _ in 0..POLICY_ITERATION_CAP {
        seen.insert(policy.clone());
        let solve = gain_and_bias(spec, &policy)?;
        let improved = greedy_improvement(spec, &solve.bias);
        if improved == policy {
            return Ok(solve);
        }
        if seen.contains(&improved) {
            return Err(PlannerError::PolicyCycle);
        }
        policy = improved;
    }
    Err(PlannerError::IterationCapExceeded(POLICY_ITERATION_CAP))
}

/// Successive differences and span of a solved bias vector.
pub fn bias_variations(solve: &SolveResult) -> BiasVariations {
    let h = &solve.bias;
    let increments = h.windows(2).map(|w| w[1] - w[0]).collect();
    let span = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - h.iter().cloned().fold(f64::INFINITY, f64::min);
    BiasVariations { increments, span }
}
