//! Named desk-scale models and seeded random generators shared by the unit
//! tests, the acceptance battery, and the `verify` command. Keeping them in
//! the library (rather than test code) lets the shipped binary re-run the
//! cross-checks in the field.

use crate::mdp::{MdpParams, MdpSpec, Policy};
use rand::Rng;

/// Three-state worked example used throughout the test suite. Every derived
/// constant of this model has been solved by hand: `U = 4`, `r_max = 3`,
/// stationary law of the idle policy `(4/9, 4/9, 1/9)`, gain `8/3`, expected
/// hitting times to 0 of `(5, 7)`, diameter `20`.
pub fn desk_params() -> MdpParams {
    MdpParams {
        lambda: 1.0,
        mu: 1.0,
        deadline_cost: 2.0,
        num_states: 3,
        max_speed: 1,
        lambda_max: 1.0,
        mu_max: 1.0,
        energy_table: vec![0.0, 1.0],
    }
}

pub fn desk_spec() -> MdpSpec {
    MdpSpec::build(desk_params()).expect("desk fixture is valid")
}

/// Two-state model whose diameter is exactly 4 (idle ascent beats full-speed
/// descent: `max(U / lambda_0, U / (A_max + mu)) = max(4, 4/3)`).
pub fn two_state_spec() -> MdpSpec {
    MdpSpec::build(MdpParams {
        lambda: 1.0,
        mu: 1.0,
        deadline_cost: 1.0,
        num_states: 2,
        max_speed: 2,
        lambda_max: 1.0,
        mu_max: 1.0,
        energy_table: vec![0.0, 1.0, 2.0],
    })
    .expect("two-state fixture is valid")
}

/// Eight-state, three-speed model sized for end-to-end learning runs.
pub fn learning_spec() -> MdpSpec {
    MdpSpec::build(MdpParams {
        lambda: 1.0,
        mu: 1.0,
        deadline_cost: 2.0,
        num_states: 8,
        max_speed: 2,
        lambda_max: 1.0,
        mu_max: 1.0,
        energy_table: vec![0.0, 1.0, 4.0],
    })
    .expect("learning fixture is valid")
}

/// Degenerate action set: the idle policy is the only policy.
pub fn single_action_spec() -> MdpSpec {
    MdpSpec::build(MdpParams {
        lambda: 1.0,
        mu: 1.0,
        deadline_cost: 2.0,
        num_states: 4,
        max_speed: 0,
        lambda_max: 1.0,
        mu_max: 1.0,
        energy_table: vec![0.0],
    })
    .expect("single-action fixture is valid")
}

/// Family with everything fixed except the state count; used to demonstrate
/// diameter growth in `S` and the `S`-insensitivity of the exploration
/// constant. The light load (`lambda / mu = 0.4`) keeps the latter spread
/// under its tolerance.
pub fn state_count_family(num_states: usize) -> MdpSpec {
    MdpSpec::build(MdpParams {
        lambda: 0.4,
        mu: 1.0,
        deadline_cost: 2.0,
        num_states,
        max_speed: 1,
        lambda_max: 1.0,
        mu_max: 1.0,
        energy_table: vec![0.0, 1.0],
    })
    .expect("state-count family is valid")
}

/// Unit-rate family (`lambda = mu = 1`) with varying state count; its
/// idle-ascent times grow super-exponentially, which the diameter growth
/// check pins down.
pub fn unit_rate_family(num_states: usize) -> MdpSpec {
    MdpSpec::build(MdpParams {
        lambda: 1.0,
        mu: 1.0,
        deadline_cost: 2.0,
        num_states,
        max_speed: 1,
        lambda_max: 1.0,
        mu_max: 1.0,
        energy_table: vec![0.0, 1.0],
    })
    .expect("unit-rate family is valid")
}

/// Parameter ranges for seeded random model generation.
#[derive(Debug, Clone)]
pub struct RandomSpecRange {
    pub states: (usize, usize),
    pub max_speed: (usize, usize),
    /// Load ratio `lambda / mu`.
    pub load: (f64, f64),
    pub mu: (f64, f64),
    pub deadline_cost: (f64, f64),
}

impl RandomSpecRange {
    /// Small instances where exhaustive oracles stay fast.
    pub fn desk() -> Self {
        RandomSpecRange {
            states: (3, 12),
            max_speed: (1, 3),
            load: (0.5, 2.5),
            mu: (0.5, 1.5),
            deadline_cost: (0.0, 4.0),
        }
    }

    /// Tiny instances for policy enumeration (`A^S` growth).
    pub fn enumerable() -> Self {
        RandomSpecRange {
            states: (3, 5),
            max_speed: (1, 2),
            load: (0.5, 2.5),
            mu: (0.5, 1.5),
            deadline_cost: (0.0, 4.0),
        }
    }

    /// Large state counts for the closed-form-vs-iterative comparisons. The
    /// deadline floor keeps the power-iteration contraction honest.
    pub fn wide() -> Self {
        RandomSpecRange {
            states: (3, 200),
            max_speed: (1, 3),
            load: (0.5, 2.5),
            mu: (0.8, 1.5),
            deadline_cost: (0.0, 4.0),
        }
    }
}

fn uniform_in<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Draws a valid model uniformly-ish from `range`. The energy table is built
/// from sorted nonnegative increments, which makes it convex and
/// nondecreasing by construction.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, range: &RandomSpecRange) -> MdpSpec {
    let num_states = rng.random_range(range.states.0..=range.states.1);
    let max_speed = rng.random_range(range.max_speed.0..=range.max_speed.1);
    let mu = uniform_in(rng, range.mu);
    let lambda = mu * uniform_in(rng, range.load);
    let lambda_max = lambda * (1.0 + 0.5 * rng.random::<f64>());
    let mu_max = mu * (1.0 + 0.5 * rng.random::<f64>());
    let deadline_cost = uniform_in(rng, range.deadline_cost);

    let mut increments: Vec<f64> = (0..max_speed).map(|_| 3.0 * rng.random::<f64>()).collect();
    increments.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut energy_table = Vec::with_capacity(max_speed + 1);
    energy_table.push(rng.random::<f64>());
    for d in increments {
        let last = *energy_table.last().unwrap();
        energy_table.push(last + d);
    }

    MdpSpec::build(MdpParams {
        lambda,
        mu,
        deadline_cost,
        num_states,
        max_speed,
        lambda_max,
        mu_max,
        energy_table,
    })
    .expect("randomly generated parameters are valid by construction")
}

/// Uniformly random stationary deterministic policy for `spec`.
pub fn random_policy<R: Rng + ?Sized>(rng: &mut R, spec: &MdpSpec) -> Policy {
    (0..spec.num_states())
        .map(|_| rng.random_range(0..spec.num_actions()))
        .collect()
}
