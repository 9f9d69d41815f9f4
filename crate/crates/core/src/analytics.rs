//! Closed-form structural quantities of the birth-death class: the binomial
//! stationary law of the idle policy, first-passage profiles, the diameter
//! via extremal policies, the logarithmic envelope on bias increments, and
//! the constants that turn those into regret reference curves.
//!
//! Everything that can outgrow `f64` (idle-ascent times scale like
//! `S^(S-2)`) is carried in natural-log space; see [`crate::magnitude`].

use crate::magnitude::{ln_add_exp, ln_binomial, ln_sum_exp, LogScaled};
use crate::mdp::{MdpSpec, Policy};
use crate::planner::{self, PlannerError, StationaryMeasure};
use crate::tridiag;
use serde::{Deserialize, Serialize};

/// Stationary law of the idle policy in closed form: the queue under speed 0
/// is a finite binomial chain, `m(s) = C(S-1, s) x^s / (1+x)^(S-1)` with
/// `x = lambda / ((S-1) mu)`. Evaluated in log space so large state counts
/// neither under- nor overflow.
pub fn idle_stationary_closed_form(spec: &MdpSpec) -> Result<StationaryMeasure, PlannerError> {
    if !(spec.params.lambda > 0.0 && spec.params.mu > 0.0) {
        return Err(PlannerError::NotIrreducible);
    }
    let n = spec.num_states();
    let x = spec.params.lambda / ((n - 1) as f64 * spec.params.mu);
    let ln_x = x.ln();
    let ln_norm = (n - 1) as f64 * x.ln_1p();
    let ln_probs: Vec<f64> = (0..n)
        .map(|s| ln_binomial(n - 1, s) + s as f64 * ln_x - ln_norm)
        .collect();
    Ok(StationaryMeasure {
        probs: ln_probs.iter().map(|l| l.exp()).collect(),
        ln_probs,
    })
}

/// Expected steps to first reach `target` from every state under one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingProfile {
    pub policy: Policy,
    pub target: usize,
    /// `expected_times[s]` = mean first-passage time from `s` to `target`;
    /// zero at the target, positive and monotone in distance elsewhere.
    pub expected_times: Vec<f64>,
}

/// First-passage profile by one anchored tridiagonal solve of
/// `(I - P) v = 1` with `v(target) = 0`.
pub fn hitting_times(
    spec: &MdpSpec,
    policy: &[usize],
    target: usize,
) -> Result<HittingProfile, PlannerError> {
    planner::check_policy(spec, policy)?;
    let n = spec.num_states();
    assert!(target < n, "target state out of range");
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let rhs = vec![1.0; n];
    for s in 0..n {
        let row = spec.transition_row(s, policy[s]);
        sub[s] = -row.down;
        diag[s] = 1.0 - row.stay;
        sup[s] = -row.up;
    }
    let expected_times = tridiag::solve_anchored(&sub, &diag, &sup, &rhs, target, 0.0);
    Ok(HittingProfile {
        policy: policy.to_vec(),
        target,
        expected_times,
    })
}

/// Dual route for the downward profile: the product-form recursion
///
/// ```text
///   E tau_s = E tau_{s-1} + (U / d_s) * sum_{s' = s}^{S-1}
///             prod_{i = s+1}^{s'} lambda_{i-1} / d_i,
/// ```
///
/// where `d_i = policy(i) + i * mu` is the downward rate. Shares no code
/// with the tridiagonal solve, which makes the two routes an honest
/// cross-check of each other.
pub fn hitting_times_to_empty_recursion(
    spec: &MdpSpec,
    policy: &[usize],
) -> Result<Vec<f64>, PlannerError> {
    planner::check_policy(spec, policy)?;
    let n = spec.num_states();
    let u = spec.uniformization;
    let mut times = vec![0.0; n];
    for s in 1..n {
        let d_s = spec.departure_rate(s, policy[s]);
        let mut acc = 1.0;
        let mut product = 1.0;
        for i in s + 1..n {
            product *= spec.arrival_rates[i - 1] / spec.departure_rate(i, policy[i]);
            acc += product;
        }
        times[s] = times[s - 1] + u / d_s * acc;
    }
    Ok(times)
}

/// Universal envelope on the downward profile,
/// `E tau_{s -> 0} <= e^(lambda/mu) * sum_{i=1..s} U / d_i`.
///
/// The classical renewal form of this bound replaces `e^(lambda/mu)` by the
/// tighter `1 / m_policy(0)`, but that form requires the stationary ratios
/// `lambda_i / d_{i+1}` to be nonincreasing (true for any policy with
/// nondecreasing speeds, hence for idle, full-speed, and gain-optimal
/// policies; see the counterexample test for a speed dip that breaks it).
/// This envelope needs no such hypothesis: each tail-to-mass ratio
/// `sum_{s' >= j} m(s') / m(j)` is a sum of products of factors bounded by
/// `lambda / ((i+1) mu)` and is therefore at most `e^(lambda/mu)`.
pub fn hitting_envelope_to_empty(spec: &MdpSpec, policy: &[usize]) -> Vec<f64> {
    let factor = (spec.params.lambda / spec.params.mu).exp();
    let mut bounds = vec![0.0; spec.num_states()];
    let mut partial = 0.0;
    for s in 1..spec.num_states() {
        partial += spec.uniformization / spec.departure_rate(s, policy[s]);
        bounds[s] = factor * partial;
    }
    bounds
}

/// Worst expected first-passage time between any ordered pair of states
/// under one fixed policy.
pub fn policy_diameter(spec: &MdpSpec, policy: &[usize]) -> Result<f64, PlannerError> {
    let mut worst = 0.0f64;
    for target in 0..spec.num_states() {
        let profile = hitting_times(spec, policy, target)?;
        for (s, t) in profile.expected_times.iter().enumerate() {
            if s != target {
                worst = worst.max(*t);
            }
        }
    }
    Ok(worst)
}

/// MDP diameter together with its two extremal components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: LogScaled,
    /// `ln E[time 0 -> S-1]` under the idle policy (slowest load direction).
    pub ln_idle_ascent: f64,
    /// `ln E[time S-1 -> 0]` under the full-speed policy.
    pub ln_full_speed_descent: f64,
}

/// Diameter `max_(s != s') min_policy E[first passage s -> s']`.
///
/// Monotonicity collapses the policy minimization: extra service speed only
/// adds downward drift, so ascents are fastest under the idle policy and
/// descents under the full-speed policy, and the binding pairs are the full
/// sweeps `0 -> S-1` and `S-1 -> 0`. Both sweep times are sums of one-step
/// passage times satisfying first-step recursions; they are accumulated in
/// log space because the ascent grows super-exponentially in `S`.
pub fn diameter(spec: &MdpSpec) -> Result<Diameter, PlannerError> {
    planner::check_policy(spec, &spec.idle_policy())?;
    let n = spec.num_states();
    let u = spec.uniformization;
    let mu = spec.params.mu;
    let a_max = spec.params.max_speed as f64;

    // Idle ascent: T_i = E[i -> i+1] = U/lambda_i + (i mu / lambda_i) T_{i-1}.
    let mut ln_up = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let lam = spec.arrival_rates[i];
        let ln_direct = (u / lam).ln();
        let ln_t = if i == 0 {
            ln_direct
        } else {
            ln_add_exp(ln_direct, (i as f64 * mu / lam).ln() + ln_up[i - 1])
        };
        ln_up.push(ln_t);
    }
    let ln_idle_ascent = ln_sum_exp(&ln_up);

    // Full-speed descent: D_i = E[i -> i-1] = U/d_i + (lambda_i / d_i) D_{i+1}
    // with d_i = A_max + i mu.
    let mut ln_down = vec![0.0; n];
    for i in (1..n).rev() {
        let d = a_max + i as f64 * mu;
        let ln_direct = (u / d).ln();
        ln_down[i] = if i == n - 1 {
            ln_direct
        } else {
            ln_add_exp(ln_direct, (spec.arrival_rates[i] / d).ln() + ln_down[i + 1])
        };
    }
    let ln_full_speed_descent = ln_sum_exp(&ln_down[1..]);

    Ok(Diameter {
        value: LogScaled::from_ln(ln_idle_ascent.max(ln_full_speed_descent)),
        ln_idle_ascent,
        ln_full_speed_descent,
    })
}

/// Envelope value `2 r_max e^(lambda/mu) (1 + ln s)` dominating every
/// policy's bias increment `|h(s) - h(s-1)|`.
pub fn bias_envelope_at(spec: &MdpSpec, s: usize) -> f64 {
    assert!(s >= 1);
    2.0 * spec.r_max * (spec.params.lambda / spec.params.mu).exp() * (1.0 + (s as f64).ln())
}

/// The envelope table for `s = 1..S-1`, aligned with
/// [`planner::BiasVariations::increments`].
pub fn bias_envelope(spec: &MdpSpec) -> Vec<f64> {
    (1..spec.num_states())
        .map(|s| bias_envelope_at(spec, s))
        .collect()
}

/// Structural constants of one model, computed once and reused by the
/// regret reference curves, exports, and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsBundle {
    /// Bias-increment envelope `delta[s-1]` for `s = 1..S-1`.
    pub delta: Vec<f64>,
    /// Weight table `f(s) = max(1, s(s-1)) / (delta(s+1) + r_max)^2` for
    /// every state. Nondecreasing from `s = 1` on (the `s = 0 -> 1` step
    /// dips because both weights are 1 while the denominator grows).
    pub f_table: Vec<f64>,
    /// `F = sum_s 1/f(s)`.
    pub big_f: f64,
    /// `sum_s max(1, s(s-1)) m_idle(s)`: the f-weighted second factorial
    /// moment of the idle stationary law.
    pub weighted_moment: f64,
    /// Exploration constant `E2 = F * weighted_moment`; essentially
    /// independent of the state count, which is what makes the main regret
    /// reference curve dimension-free.
    pub e2: f64,
    pub diameter: Diameter,
    /// Horizon scale `(10 D / m_full(S-1))^2 * ln((10 D / m_full(S-1))^4)`
    /// after which the secondary regret term is dominated.
    pub q_max: LogScaled,
    /// Stationary mass of the top state under the full-speed policy (the
    /// hardest state to keep visited).
    pub m_max_last: LogScaled,
}

/// Computes the full constant bundle for `spec`.
pub fn e2_constants(spec: &MdpSpec) -> Result<AnalyticsBundle, PlannerError> {
    let idle = idle_stationary_closed_form(spec)?;
    let n = spec.num_states();
    let r_max = spec.r_max;
    let mut f_table = Vec::with_capacity(n);
    let mut big_f = 0.0;
    let mut weighted_moment = 0.0;
    for s in 0..n {
        let weight = 1.0f64.max((s * s.saturating_sub(1)) as f64);
        let envelope = bias_envelope_at(spec, s + 1) + r_max;
        f_table.push(weight / (envelope * envelope));
        big_f += envelope * envelope / weight;
        weighted_moment += weight * idle.probs[s];
    }

    let diameter = diameter(spec)?;
    let full = planner::stationary_measure(spec, &spec.full_speed_policy())?;
    let ln_m_last = full.ln_probs[n - 1];
    let ln_b = 10.0f64.ln() + diameter.value.ln() - ln_m_last;

    Ok(AnalyticsBundle {
        delta: bias_envelope(spec),
        f_table,
        big_f,
        weighted_moment,
        e2: big_f * weighted_moment,
        diameter,
        q_max: LogScaled::from_ln(2.0 * ln_b + (4.0 * ln_b).ln()),
        m_max_last: LogScaled::from_ln(ln_m_last),
    })
}

/// Reference regret quantities at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretBounds {
    /// `19 sqrt(E2 * A * T * ln(2 A T))`: the dimension-light main curve.
    pub upper_main: f64,
    /// `97 r_max D^2 S A max(Q_max, T^(1/4)) ln^2(2 A T)`: the lower-order
    /// term, astronomically large and therefore carried in log scale.
    pub upper_secondary: LogScaled,
    /// `0.015 sqrt(D S A T)`: worst-case-over-class reference line; not a
    /// bound for any one fixed instance.
    pub minimax_lower: LogScaled,
}

/// Worst-case-over-class reference `0.015 sqrt(D S A T)` from `ln D`.
pub fn minimax_lower(ln_diameter: f64, states: usize, actions: usize, horizon: u64) -> LogScaled {
    let ln = 0.015f64.ln()
        + 0.5
            * (ln_diameter
                + (states as f64).ln()
                + (actions as f64).ln()
                + (horizon as f64).ln());
    LogScaled::from_ln(ln)
}

/// Evaluates the reference curves of `spec` at horizon `T >= 2`.
pub fn regret_bounds(spec: &MdpSpec, bundle: &AnalyticsBundle, horizon: u64) -> RegretBounds {
    assert!(horizon >= 2);
    let states = spec.num_states() as f64;
    let actions = spec.num_actions() as f64;
    let t = horizon as f64;
    let ln_2at = (2.0 * actions * t).ln();

    let upper_main = 19.0 * (bundle.e2 * actions * t * ln_2at).sqrt();

    let ln_d = bundle.diameter.value.ln();
    let ln_secondary = 97.0f64.ln()
        + spec.r_max.ln()
        + 2.0 * ln_d
        + states.ln()
        + actions.ln()
        + bundle.q_max.ln().max(0.25 * t.ln())
        + 2.0 * ln_2at.ln();

    RegretBounds {
        upper_main,
        upper_secondary: LogScaled::from_ln(ln_secondary),
        minimax_lower: minimax_lower(ln_d, spec.num_states(), spec.num_actions(), horizon),
    }
}
