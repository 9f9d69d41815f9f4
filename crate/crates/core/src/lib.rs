//! Average-reward planning and learning for an energy-aware speed-scaling
//! queue with deadlines.
//!
//! The model is a uniformized birth-death MDP: the state is the queue
//! length, the action is a processing speed, arrivals slow down linearly as
//! the queue fills, and each step pays for energy plus a penalty whenever a
//! deadline fires. The crate provides:
//!
//! - exact construction and validation of the model ([`mdp`]),
//! - exact average-reward planning for fixed policies and policy iteration
//!   for the optimal one, via closed-form stationary measures and a
//!   tridiagonal Poisson solve ([`planner`]),
//! - closed-form structural constants: binomial idle law, first-passage
//!   profiles, diameter, bias-increment envelopes, and regret reference
//!   curves ([`analytics`]),
//! - an optimistic online learner with extended value iteration, in both a
//!   classic and a structure-aware confidence parametrization ([`ucrl2`]),
//! - reproducible simulation, regret accounting, and sweep drivers
//!   ([`harness`]),
//! - deliberately slow brute-force references for all of the above
//!   ([`oracle`]) and the cross-check suite wiring them together
//!   ([`verify`]).
//!
//! Everything is deterministic given the seeds; quantities that outgrow
//! `f64` (the diameter grows like `S^(S-2)`) are carried in log space
//! ([`magnitude`]).

pub mod analytics;
pub mod fixtures;
pub mod magnitude;
pub mod mdp;
pub mod oracle;
pub mod harness;
pub mod planner;
mod tridiag;
pub mod ucrl2;
pub mod verify;

pub use mdp::{MdpParams, MdpSpec, Policy, SpecError, TransitionRow};
pub use planner::{
    gain_and_bias, optimal_policy, stationary_measure, PlannerError, SolveResult,
    StationaryMeasure,
};
