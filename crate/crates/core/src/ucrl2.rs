//! Optimistic online learner for the queue: visit counts and empirical
//! estimates, confidence balls around them (a classic parametrization with
//! an explicit failure probability, and a tighter structure-aware one),
//! extended value iteration over the ball restricted to the birth-death
//! support, and the count-doubling episode loop.
//!
//! The learner is given only the state count, the action count, and the
//! reward ceiling `r_max`; rates and costs stay hidden. All decisions are
//! deterministic functions of the observation history, so identical seeds
//! in the environment reproduce identical runs bit for bit.

use crate::mdp::{support_range, MdpSpec, Policy};
use crate::planner::TIE_TOLERANCE;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Damping weight for the aperiodicity fallback re-run of value iteration.
const APERIODICITY_KAPPA: f64 = 0.01;

/// Confidence-ball parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfidenceMode {
    /// Radii with explicit `delta` and state-count factors.
    Classic,
    /// Structure-aware radii: no `delta`, no state-count factor, support
    /// restriction doing the work instead.
    Tweaked,
}

/// Scale of the value-iteration stopping threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EviAccuracyMode {
    /// `r_max / sqrt(t_k)`: scale-invariant in reward units (default).
    RewardScaled,
    /// `1 / sqrt(t_k)`: the raw variant, kept for comparison.
    Unit,
}

fn default_mode() -> ConfidenceMode {
    ConfidenceMode::Tweaked
}
fn default_delta() -> f64 {
    0.05
}
fn default_accuracy() -> EviAccuracyMode {
    EviAccuracyMode::RewardScaled
}
fn default_evi_cap() -> usize {
    10_000
}

/// Learner configuration, embeddable in experiment files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    #[serde(default = "default_mode")]
    pub mode: ConfidenceMode,
    /// Confidence parameter in `(0,1)`; read in classic mode only.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Reward ceiling announced to the learner.
    pub r_max_known: f64,
    #[serde(default = "default_accuracy")]
    pub evi_accuracy_mode: EviAccuracyMode,
    #[serde(default = "default_evi_cap")]
    pub max_evi_iterations: usize,
}

impl LearnerConfig {
    pub fn tweaked(r_max_known: f64) -> Self {
        LearnerConfig {
            mode: ConfidenceMode::Tweaked,
            delta: default_delta(),
            r_max_known,
            evi_accuracy_mode: default_accuracy(),
            max_evi_iterations: default_evi_cap(),
        }
    }

    pub fn classic(r_max_known: f64, delta: f64) -> Self {
        LearnerConfig {
            mode: ConfidenceMode::Classic,
            delta,
            ..Self::tweaked(r_max_known)
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ConfigError::DeltaOutOfRange { delta: self.delta });
        }
        if !(self.r_max_known > 0.0 && self.r_max_known.is_finite()) {
            return Err(ConfigError::BadRewardCeiling {
                value: self.r_max_known,
            });
        }
        if self.max_evi_iterations == 0 {
            return Err(ConfigError::ZeroIterationCap);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("confidence parameter delta must lie in (0,1), got {delta}")]
    DeltaOutOfRange { delta: f64 },
    #[error("reward ceiling must be positive and finite, got {value}")]
    BadRewardCeiling { value: f64 },
    #[error("value-iteration cap must be positive")]
    ZeroIterationCap,
}

/// Value iteration failed to contract even after the aperiodicity fallback.
#[derive(Debug, Error, PartialEq)]
pub enum EviError {
    #[error(
        "extended value iteration did not converge: span {span} still above \
         threshold {threshold} after {iterations} iterations (with damping)"
    )]
    DidNotConverge {
        iterations: usize,
        span: f64,
        threshold: f64,
    },
}

/// Empirical centers of the confidence balls. Transition rows are stored as
/// `(down, stay, up)` triples; entries outside the structural support are
/// identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub num_states: usize,
    pub num_actions: usize,
    /// `rewards[s * num_actions + a]` = mean observed reward, 0 if unvisited.
    pub rewards: Vec<f64>,
    /// Empirical next-state law; uniform on the support if unvisited.
    pub transitions: Vec<[f64; 3]>,
}

/// Per-pair confidence radii, indexed like [`Estimates`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    pub reward: Vec<f64>,
    pub transition: Vec<f64>,
}

/// Confidence radii `(eps_r, eps_p)` for one state-action pair with `n`
/// visits at episode start time `t_k`. The transition radius is clamped to
/// 2 (the L1 diameter of the simplex) and the reward radius to `r_max`.
pub fn confidence_radii(
    config: &LearnerConfig,
    t_k: u64,
    n: u64,
    num_states: usize,
    num_actions: usize,
) -> (f64, f64) {
    assert!(t_k >= 1);
    let n = n.max(1) as f64;
    let t = t_k as f64;
    let s_count = num_states as f64;
    let a_count = num_actions as f64;
    let (eps_r, eps_p) = match config.mode {
        ConfidenceMode::Classic => {
            let log_r = (2.0 * s_count * a_count * t / config.delta).ln();
            let log_p = (2.0 * a_count * t / config.delta).ln();
            (
                config.r_max_known * (7.0 * log_r / (2.0 * n)).sqrt(),
                (14.0 * s_count * log_p / n).sqrt(),
            )
        }
        ConfidenceMode::Tweaked => {
            let log = (2.0 * a_count * t).ln();
            (
                config.r_max_known * (2.0 * log / n).sqrt(),
                (8.0 * log / n).sqrt(),
            )
        }
    };
    (eps_r.min(config.r_max_known), eps_p.min(2.0))
}

/// Best distribution in the L1 ball: maximizes `sum q(j) u(j)` over
/// distributions `q` on the support with `|q - p_hat|_1 <= eps_p`.
///
/// Sorted-shift procedure: pour `min(eps_p / 2, 1 - p_hat(best))` onto the
/// best-value state, then drain the same amount from the worst-value states
/// upward. Both slices are compact (support entries only, in state order).
pub fn inner_max(p_hat: &[f64], eps_p: f64, u: &[f64]) -> Vec<f64> {
    debug_assert_eq!(p_hat.len(), u.len());
    debug_assert!((0.0..=2.0 + 1e-12).contains(&eps_p));
    let mut q = p_hat.to_vec();
    let mut best = 0;
    for j in 1..u.len() {
        if u[j] > u[best] {
            best = j;
        }
    }
    let add = (eps_p / 2.0).min(1.0 - q[best]);
    q[best] += add;
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&i, &j| u[i].partial_cmp(&u[j]).unwrap().then(i.cmp(&j)));
    let mut excess = add;
    for &j in &order {
        if j == best || excess <= 0.0 {
            continue;
        }
        let cut = q[j].min(excess);
        q[j] -= cut;
        excess -= cut;
    }
    q
}

/// Outcome of one extended-value-iteration solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EviResult {
    pub policy: Policy,
    /// Optimistic gain: midpoint of the final iterate difference, clamped
    /// to the announced reward ceiling.
    pub rho_tilde: f64,
    /// Final sweep output. The iterate sequence is min-anchored internally,
    /// so only differences between entries carry meaning.
    pub u: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Whether the damped (aperiodicity-transformed) re-run was needed.
    pub used_transform: bool,
}

/// One optimistic Bellman sweep; returns the raw updated values and the
/// greedy policy (smallest speed within a tie tolerance).
fn sweep(
    estimates: &Estimates,
    radii: &Radii,
    config: &LearnerConfig,
    u: &[f64],
) -> (Vec<f64>, Policy) {
    let n = estimates.num_states;
    let a_count = estimates.num_actions;
    let mut u_next = vec![0.0; n];
    let mut policy = vec![0usize; n];
    let mut values = vec![0.0; a_count];
    for s in 0..n {
        let support = support_range(n, s);
        let lo = *support.start();
        let hi = *support.end();
        let u_slice = &u[lo..=hi];
        for (a, value) in values.iter_mut().enumerate() {
            let idx = s * a_count + a;
            let triple = &estimates.transitions[idx];
            let mut compact = [0.0; 3];
            let width = hi - lo + 1;
            for (j, state) in (lo..=hi).enumerate() {
                compact[j] = if state + 1 == s {
                    triple[0]
                } else if state == s {
                    triple[1]
                } else {
                    triple[2]
                };
            }
            let q = inner_max(&compact[..width], radii.transition[idx], u_slice);
            let optimistic_reward =
                (estimates.rewards[idx] + radii.reward[idx]).min(config.r_max_known);
            *value = optimistic_reward
                + q.iter().zip(u_slice.iter()).map(|(a, b)| a * b).sum::<f64>();
        }
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let choice = values
            .iter()
            .position(|v| *v >= best - TIE_TOLERANCE)
            .expect("at least one action");
        policy[s] = choice;
        u_next[s] = values[choice];
    }
    (u_next, policy)
}

fn evi_run(
    estimates: &Estimates,
    radii: &Radii,
    config: &LearnerConfig,
    threshold: f64,
    kappa: f64,
) -> Result<EviResult, EviError> {
    let n = estimates.num_states;
    let damp = 1.0 - kappa;
    let stop = threshold * damp;
    let mut u = vec![0.0; n];
    let mut last_span = f64::INFINITY;
    for iteration in 1..=config.max_evi_iterations {
        let (mut u_next, policy) = sweep(estimates, radii, config, &u);
        if kappa > 0.0 {
            for (next, prev) in u_next.iter_mut().zip(u.iter()) {
                *next = damp * *next + kappa * prev;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (next, prev) in u_next.iter().zip(u.iter()) {
            let d = next - prev;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        last_span = hi - lo;
        if last_span < stop {
            return Ok(EviResult {
                policy,
                rho_tilde: ((hi + lo) / 2.0 / damp).min(config.r_max_known),
                u: u_next,
                iterations: iteration,
                converged: true,
                used_transform: kappa > 0.0,
            });
        }
        let min = u_next.iter().cloned().fold(f64::INFINITY, f64::min);
        for v in u_next.iter_mut() {
            *v -= min;
        }
        u = u_next;
    }
    Err(EviError::DidNotConverge {
        iterations: config.max_evi_iterations,
        span: last_span,
        threshold: stop,
    })
}

/// Extended value iteration over the confidence ball.
///
/// Iterates `u_{i+1}(s) = max_a { min(r_hat + eps_r, r_max) +
/// inner_max(p_hat, eps_p, u_i) . u_i }` from `u_0 = 0` and stops when the
/// span of `u_{i+1} - u_i` falls below the accuracy threshold (default
/// `r_max / sqrt(t_k)`). The optimistic gain is the midpoint of the final
/// difference, accurate to half the threshold. If the plain iteration hits
/// the cap (an optimistic kernel can zero out the self loops and cycle),
/// the damped update `u <- (1-kappa) L(u) + kappa u` is tried once with the
/// threshold and gain rescaled by `1 - kappa`; a second failure is reported
/// as an error.
pub fn extended_value_iteration(
    estimates: &Estimates,
    radii: &Radii,
    t_k: u64,
    config: &LearnerConfig,
) -> Result<EviResult, EviError> {
    let scale = match config.evi_accuracy_mode {
        EviAccuracyMode::RewardScaled => config.r_max_known,
        EviAccuracyMode::Unit => 1.0,
    };
    let threshold = scale / (t_k as f64).sqrt();
    evi_run(estimates, radii, config, threshold, 0.0)
        .or_else(|_| evi_run(estimates, radii, config, threshold, APERIODICITY_KAPPA))
}

/// Metadata of a freshly opened episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeInfo {
    pub k: u64,
    pub t_k: u64,
    pub rho_tilde: f64,
    pub evi_iterations: usize,
    pub used_transform: bool,
}

/// What [`Ucrl2Learner::next_action`] decided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub action: usize,
    /// Present when this step closed the previous episode and opened a new
    /// one (always present on the very first step).
    pub new_episode: Option<EpisodeInfo>,
}

/// The learner: counting state, frozen per-episode estimates, and the
/// current optimistic policy.
#[derive(Debug, Clone)]
pub struct Ucrl2Learner {
    config: LearnerConfig,
    num_states: usize,
    num_actions: usize,
    /// Current time `t`, starting at 1; incremented by [`observe`].
    t: u64,
    /// Lifetime visit counts `N_t(s,a)`; their sum is always `t - 1`.
    visit_counts: Vec<u64>,
    /// Visits within the running episode.
    episode_counts: Vec<u64>,
    reward_sums: Vec<f64>,
    /// Observed next-state counts as `(down, stay, up)` per pair.
    transition_counts: Vec<[u64; 3]>,
    /// Episode index `k`, 0 before the first step.
    k: u64,
    /// Start time of the running episode.
    t_k: u64,
    /// Snapshot of `visit_counts` taken at `t_k`.
    counts_at_episode_start: Vec<u64>,
    /// Estimates and radii frozen when the episode opened.
    episode_estimates: Estimates,
    episode_radii: Radii,
    policy: Policy,
    /// Per-pair `sum_k nu_k / sqrt(max(1, N_{t_k}))` over closed episodes.
    ratio_sums: Vec<f64>,
}

impl Ucrl2Learner {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        config: LearnerConfig,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        assert!(num_states >= 2 && num_actions >= 1);
        let pairs = num_states * num_actions;
        Ok(Ucrl2Learner {
            config,
            num_states,
            num_actions,
            t: 1,
            visit_counts: vec![0; pairs],
            episode_counts: vec![0; pairs],
            reward_sums: vec![0.0; pairs],
            transition_counts: vec![[0; 3]; pairs],
            k: 0,
            t_k: 1,
            counts_at_episode_start: vec![0; pairs],
            episode_estimates: Estimates {
                num_states,
                num_actions,
                rewards: vec![0.0; pairs],
                transitions: vec![[0.0; 3]; pairs],
            },
            episode_radii: Radii {
                reward: vec![0.0; pairs],
                transition: vec![0.0; pairs],
            },
            policy: vec![0; num_states],
            ratio_sums: vec![0.0; pairs],
        })
    }

    fn pair(&self, s: usize, a: usize) -> usize {
        s * self.num_actions + a
    }

    /// Empirical centers from the lifetime counts: observed means where
    /// visited, reward 0 and the uniform law on the structural support
    /// where not.
    pub fn empirical_estimates(&self) -> Estimates {
        let mut rewards = vec![0.0; self.visit_counts.len()];
        let mut transitions = vec![[0.0; 3]; self.visit_counts.len()];
        for s in 0..self.num_states {
            let support = support_range(self.num_states, s);
            let width = (support.end() - support.start() + 1) as f64;
            for a in 0..self.num_actions {
                let idx = self.pair(s, a);
                let n = self.visit_counts[idx];
                if n == 0 {
                    for j in 0..3 {
                        let in_support = match j {
                            0 => s > 0,
                            1 => true,
                            _ => s + 1 < self.num_states,
                        };
                        transitions[idx][j] = if in_support { 1.0 / width } else { 0.0 };
                    }
                } else {
                    rewards[idx] = self.reward_sums[idx] / n as f64;
                    for j in 0..3 {
                        transitions[idx][j] =
                            self.transition_counts[idx][j] as f64 / n as f64;
                    }
                }
            }
        }
        Estimates {
            num_states: self.num_states,
            num_actions: self.num_actions,
            rewards,
            transitions,
        }
    }

    /// Per-pair radii for an episode starting at `t_k` with the current
    /// lifetime counts.
    fn radii_for_counts(&self, t_k: u64) -> Radii {
        let mut reward = vec![0.0; self.visit_counts.len()];
        let mut transition = vec![0.0; self.visit_counts.len()];
        for (idx, &n) in self.visit_counts.iter().enumerate() {
            let (eps_r, eps_p) =
                confidence_radii(&self.config, t_k, n, self.num_states, self.num_actions);
            reward[idx] = eps_r;
            transition[idx] = eps_p;
        }
        Radii { reward, transition }
    }

    fn open_episode(&mut self) -> Result<EpisodeInfo, EviError> {
        self.k += 1;
        self.t_k = self.t;
        // Fold the closed episode into the visit-ratio ledger, then reset.
        for idx in 0..self.episode_counts.len() {
            if self.episode_counts[idx] > 0 {
                self.ratio_sums[idx] += self.episode_counts[idx] as f64
                    / (self.counts_at_episode_start[idx].max(1) as f64).sqrt();
            }
        }
        self.episode_counts.iter_mut().for_each(|c| *c = 0);
        self.counts_at_episode_start.copy_from_slice(&self.visit_counts);
        self.episode_estimates = self.empirical_estimates();
        self.episode_radii = self.radii_for_counts(self.t_k);
        let evi = extended_value_iteration(
            &self.episode_estimates,
            &self.episode_radii,
            self.t_k,
            &self.config,
        )?;
        self.policy = evi.policy;
        Ok(EpisodeInfo {
            k: self.k,
            t_k: self.t_k,
            rho_tilde: evi.rho_tilde,
            evi_iterations: evi.iterations,
            used_transform: evi.used_transform,
        })
    }

    /// Chooses the action for the current state. Closes the running episode
    /// first when the count-doubling criterion fires: the episode ends as
    /// soon as the pair about to be played has been visited within the
    /// episode at least `max(1, N_{t_k})` times.
    pub fn next_action(&mut self, state: usize) -> Result<Decision, EviError> {
        assert!(state < self.num_states);
        let mut new_episode = None;
        if self.k == 0 {
            new_episode = Some(self.open_episode()?);
        } else {
            let idx = self.pair(state, self.policy[state]);
            if self.episode_counts[idx] >= self.counts_at_episode_start[idx].max(1) {
                new_episode = Some(self.open_episode()?);
            }
        }
        Ok(Decision {
            action: self.policy[state],
            new_episode,
        })
    }

    /// Records one environment transition and advances the clock.
    pub fn observe(&mut self, state: usize, action: usize, reward: f64, next_state: usize) {
        let idx = self.pair(state, action);
        self.visit_counts[idx] += 1;
        self.episode_counts[idx] += 1;
        self.reward_sums[idx] += reward;
        let slot = match next_state as i64 - state as i64 {
            -1 => 0,
            0 => 1,
            1 => 2,
            jump => panic!("observed a jump of {jump} states; support is one step wide"),
        };
        self.transition_counts[idx][slot] += 1;
        self.t += 1;
    }

    /// Whether the true model sits inside the episode's confidence ball
    /// (diagnostic; the learner never reads this).
    pub fn membership_check(&self, spec: &MdpSpec) -> bool {
        in_confidence_set(spec, &self.episode_estimates, &self.episode_radii)
    }

    /// Membership with estimates and radii recomputed from the live counts
    /// at the current time (for failure-frequency probes at fixed times).
    pub fn membership_check_now(&self, spec: &MdpSpec) -> bool {
        in_confidence_set(spec, &self.empirical_estimates(), &self.radii_for_counts(self.t))
    }

    /// `sum over episodes of nu_k(s,a) / sqrt(max(1, N_{t_k}(s,a)))` per
    /// pair, including the still-open episode.
    pub fn visit_ratio_sums(&self) -> Vec<f64> {
        let mut sums = self.ratio_sums.clone();
        for idx in 0..sums.len() {
            if self.episode_counts[idx] > 0 {
                sums[idx] += self.episode_counts[idx] as f64
                    / (self.counts_at_episode_start[idx].max(1) as f64).sqrt();
            }
        }
        sums
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn episode_index(&self) -> u64 {
        self.k
    }

    pub fn episode_start(&self) -> u64 {
        self.t_k
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn visit_count(&self, s: usize, a: usize) -> u64 {
        self.visit_counts[self.pair(s, a)]
    }

    pub fn total_visits(&self) -> u64 {
        self.visit_counts.iter().sum()
    }
}

/// True iff every pair's true mean reward and transition row lie within the
/// given radii of the estimates.
pub fn in_confidence_set(spec: &MdpSpec, estimates: &Estimates, radii: &Radii) -> bool {
    let a_count = spec.num_actions();
    for s in 0..spec.num_states() {
        for a in 0..a_count {
            let idx = s * a_count + a;
            if (estimates.rewards[idx] - spec.mean_reward(s, a)).abs() > radii.reward[idx] {
                return false;
            }
            let row = spec.transition_row(s, a);
            let p_hat = &estimates.transitions[idx];
            let deviation = (p_hat[0] - row.down).abs()
                + (p_hat[1] - row.stay).abs()
                + (p_hat[2] - row.up).abs();
            if deviation > radii.transition[idx] {
                return false;
            }
        }
    }
    true
}
