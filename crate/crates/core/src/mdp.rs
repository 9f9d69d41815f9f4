//! Controlled birth-death model of a speed-scaled service queue.
//!
//! A single station holds up to `S - 1` jobs (state = queue length). Jobs
//! arrive at rate `lambda_i = lambda * (1 - i / (S - 1))`, so arrivals thin
//! out linearly as the buffer fills and stop entirely at the top state. Each
//! waiting job abandons independently at rate `mu` (a deadline expiry that
//! costs `C`), and the controller picks an integer processing speed
//! `a in {0..A_max}` that completes one job at rate `a` while drawing energy
//! `w(a)` per unit time, with `w` convex and nondecreasing.
//!
//! The continuous-time chain is uniformized at rate
//! `U = lambda_max + (S - 1) * mu_max + A_max`, which dominates the total
//! event rate of every admissible parameterization, giving a discrete-time
//! MDP on `{0..S-1}` whose rows move at most one step:
//!
//! ```text
//!   P(s, s+1) = lambda_s / U                (s < S - 1)
//!   P(s, s-1) = (a + s * mu) / U            (s > 0)
//!   P(s, s)   = 1 - the above
//! ```
//!
//! Per-step cost is `w(a) / U` for energy plus `C` exactly when a deadline
//! fires (probability `s * mu / U`); the reward is `r_max - cost` with
//! `r_max = C + w(A_max) / mu`, an offset that keeps every reward in
//! `[0, r_max]`. The mean reward is therefore
//! `r_bar(s, a) = r_max - w(a) / U - C * s * mu / U`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raw model parameters as they appear in spec JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpParams {
    /// Arrival rate of jobs at an empty queue, `0 < lambda <= lambda_max`.
    pub lambda: f64,
    /// Per-job deadline hazard rate, `0 < mu <= mu_max`.
    pub mu: f64,
    /// Penalty paid each time a deadline fires (`C >= 0`).
    pub deadline_cost: f64,
    /// Number of states `S >= 2`; queue lengths are `0..S-1`.
    pub num_states: usize,
    /// Largest speed `A_max`; the action set is `{0..A_max}`.
    pub max_speed: usize,
    /// Class-level cap on arrival rates, used by the uniformization constant.
    pub lambda_max: f64,
    /// Class-level cap on deadline rates, used by the uniformization constant.
    pub mu_max: f64,
    /// Energy drawn per unit time at each speed; length `A_max + 1`,
    /// nondecreasing and convex with `w(0) >= 0`.
    pub energy_table: Vec<f64>,
}

/// Validated model together with its derived constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpSpec {
    pub params: MdpParams,
    /// Uniformization rate `U = lambda_max + (S - 1) * mu_max + A_max`.
    pub uniformization: f64,
    /// State-dependent arrival rates `lambda_i`, one per state.
    pub arrival_rates: Vec<f64>,
    /// Reward offset `C + w(A_max) / mu`; all rewards live in `[0, r_max]`.
    pub r_max: f64,
}

/// One transition row; the chain never moves more than one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRow {
    pub down: f64,
    pub stay: f64,
    pub up: f64,
}

/// Deterministic stationary policy: one speed per state.
pub type Policy = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("num_states must be at least 2, got {0}")]
    TooFewStates(usize),
    #[error("energy table has {got} entries, expected max_speed + 1 = {want}")]
    EnergyTableLength { got: usize, want: usize },
    #[error("energy table must be nonnegative, nondecreasing, and convex")]
    EnergyTableShape,
    #[error("arrival rate lambda = {lambda} outside (0, lambda_max = {lambda_max}]")]
    ArrivalRateOutOfRange { lambda: f64, lambda_max: f64 },
    #[error("deadline rate mu = {mu} outside (0, mu_max = {mu_max}]")]
    DeadlineRateOutOfRange { mu: f64, mu_max: f64 },
    #[error("deadline cost must be nonnegative and finite, got {0}")]
    BadDeadlineCost(f64),
    #[error("parameter {name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

impl MdpSpec {
    /// Validates raw parameters and precomputes the derived constants.
    pub fn build(params: MdpParams) -> Result<Self, SpecError> {
        let s_count = params.num_states;
        if s_count < 2 {
            return Err(SpecError::TooFewStates(s_count));
        }
        for (name, value) in [
            ("lambda", params.lambda),
            ("mu", params.mu),
            ("deadline_cost", params.deadline_cost),
            ("lambda_max", params.lambda_max),
            ("mu_max", params.mu_max),
        ] {
            if !value.is_finite() {
                return Err(SpecError::NonFinite { name, value });
            }
        }
        let want = params.max_speed + 1;
        if params.energy_table.len() != want {
            return Err(SpecError::EnergyTableLength {
                got: params.energy_table.len(),
                want,
            });
        }
        let w = &params.energy_table;
        if w.iter().any(|x| !x.is_finite()) {
            return Err(SpecError::NonFinite {
                name: "energy_table",
                value: f64::NAN,
            });
        }
        let nonneg = w[0] >= 0.0;
        let nondecreasing = w.windows(2).all(|p| p[1] >= p[0]);
        let convex = w.windows(3).all(|p| p[2] - p[1] >= p[1] - p[0]);
        if !(nonneg && nondecreasing && convex) {
            return Err(SpecError::EnergyTableShape);
        }
        if !(params.lambda > 0.0 && params.lambda <= params.lambda_max) {
            return Err(SpecError::ArrivalRateOutOfRange {
                lambda: params.lambda,
                lambda_max: params.lambda_max,
            });
        }
        if !(params.mu > 0.0 && params.mu <= params.mu_max) {
            return Err(SpecError::DeadlineRateOutOfRange {
                mu: params.mu,
                mu_max: params.mu_max,
            });
        }
        if params.deadline_cost < 0.0 {
            return Err(SpecError::BadDeadlineCost(params.deadline_cost));
        }

        let uniformization =
            params.lambda_max + (s_count - 1) as f64 * params.mu_max + params.max_speed as f64;
        let arrival_rates = (0..s_count)
            .map(|i| params.lambda * (1.0 - i as f64 / (s_count - 1) as f64))
            .collect();
        let r_max = params.deadline_cost + params.energy_table[params.max_speed] / params.mu;
        Ok(MdpSpec {
            params,
            uniformization,
            arrival_rates,
            r_max,
        })
    }

    pub fn num_states(&self) -> usize {
        self.params.num_states
    }

    /// Number of actions `A = A_max + 1`.
    pub fn num_actions(&self) -> usize {
        self.params.max_speed + 1
    }

    /// Total service-like rate `a + s * mu` that moves the queue down.
    pub fn departure_rate(&self, s: usize, a: usize) -> f64 {
        a as f64 + s as f64 * self.params.mu
    }

    /// Transition probabilities out of `s` under speed `a`.
    pub fn transition_row(&self, s: usize, a: usize) -> TransitionRow {
        debug_assert!(s < self.num_states() && a < self.num_actions());
        let u = self.uniformization;
        let up = if s + 1 < self.num_states() {
            self.arrival_rates[s] / u
        } else {
            0.0
        };
        let down = if s > 0 { self.departure_rate(s, a) / u } else { 0.0 };
        TransitionRow {
            down,
            stay: 1.0 - up - down,
            up,
        }
    }

    /// Expected one-step reward `r_max - w(a)/U - C * s * mu / U`.
    pub fn mean_reward(&self, s: usize, a: usize) -> f64 {
        debug_assert!(s < self.num_states() && a < self.num_actions());
        let u = self.uniformization;
        self.r_max
            - self.params.energy_table[a] / u
            - self.params.deadline_cost * s as f64 * self.params.mu / u
    }

    /// States reachable in one step: `{s-1, s, s+1}` clipped to the state
    /// space, returned as an inclusive range. This structural support is
    /// public knowledge that learners may exploit.
    pub fn support_of(&self, s: usize) -> std::ops::RangeInclusive<usize> {
        support_range(self.num_states(), s)
    }

    /// Draws one environment step. Consumes exactly two uniforms from the
    /// stream in a fixed order: first the next state (CDF over ascending
    /// states: down, stay, up), then the deadline Bernoulli that determines
    /// the reward. The second draw happens even when its probability is zero
    /// so that the stream layout does not depend on the visited state.
    pub fn sample_step<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> (usize, f64) {
        let row = self.transition_row(s, a);
        let u1: f64 = rng.random();
        let next = if u1 < row.down {
            s - 1
        } else if u1 < row.down + row.stay {
            s
        } else {
            s + 1
        };
        let deadline_prob = s as f64 * self.params.mu / self.uniformization;
        let u2: f64 = rng.random();
        let penalty = if u2 < deadline_prob {
            self.params.deadline_cost
        } else {
            0.0
        };
        let reward =
            self.r_max - self.params.energy_table[a] / self.uniformization - penalty;
        (next, reward)
    }

    /// Dense `S x S` kernel of the chain induced by `policy`.
    pub fn dense_kernel(&self, policy: &[usize]) -> Vec<Vec<f64>> {
        assert_eq!(policy.len(), self.num_states());
        let n = self.num_states();
        let mut kernel = vec![vec![0.0; n]; n];
        for s in 0..n {
            let row = self.transition_row(s, policy[s]);
            if s > 0 {
                kernel[s][s - 1] = row.down;
            }
            kernel[s][s] = row.stay;
            if s + 1 < n {
                kernel[s][s + 1] = row.up;
            }
        }
        kernel
    }

    /// The idle policy (speed 0 everywhere): the worst-case load profile that
    /// anchors the closed-form analytics.
    pub fn idle_policy(&self) -> Policy {
        vec![0; self.num_states()]
    }

    /// The full-speed policy (speed `A_max` everywhere).
    pub fn full_speed_policy(&self) -> Policy {
        vec![self.params.max_speed; self.num_states()]
    }

    /// Short human-readable tag used as a default run identifier.
    pub fn label(&self) -> String {
        format!(
            "S{}A{}_lam{}_mu{}_C{}",
            self.params.num_states,
            self.params.max_speed,
            self.params.lambda,
            self.params.mu,
            self.params.deadline_cost
        )
    }
}

/// Structural transition support of state `s` in a chain with `num_states`
/// states: the one-step neighborhood `{s-1, s, s+1}` clipped to the state
/// space. Depends only on the queue geometry, never on the rates, so the
/// learner may use it without being told the model.
pub fn support_range(num_states: usize, s: usize) -> std::ops::RangeInclusive<usize> {
    let lo = s.saturating_sub(1);
    let hi = (s + 1).min(num_states - 1);
    lo..=hi
}

impl TransitionRow {
    /// Probabilities as a dense length-`n` row with mass only on `s-1..=s+1`.
    pub fn to_dense(&self, s: usize, n: usize) -> Vec<f64> {
        let mut row = vec![0.0; n];
        if s > 0 {
            row[s - 1] = self.down;
        }
        row[s] = self.stay;
        if s + 1 < n {
            row[s + 1] = self.up;
        }
        row
    }
}
