//! End-to-end learning-curve experiment on the three-state fixture: at this
//! scale every pair is visited often enough that the confidence widths
//! resolve well before the horizon, and the averaged pseudo-regret curve
//! shows its square-root growth in the last decade.

use speedscale::fixtures::desk_spec;
use speedscale::harness::{aggregate_traces, sweep, GridPoint};
use speedscale::ucrl2::LearnerConfig;

/// Twenty seeds at T = 1e6 on the S=3 fixture: the fitted log-log slope of
/// mean pseudo-regret over the last decade sits in [0.35, 0.65].
#[test]
fn three_state_slope_is_square_root_like() {
    let spec = desk_spec();
    let point = GridPoint {
        id: "three-state".into(),
        spec: spec.params.clone(),
        horizon: 1_000_000,
        learner: LearnerConfig::tweaked(spec.r_max),
    };
    let outcome = sweep(&[point], 20, 2024);
    assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
    let aggregate = aggregate_traces(&outcome.traces).unwrap();
    let slope = aggregate.pseudo_slope_last_decade.unwrap();
    assert!(
        (0.35..=0.65).contains(&slope),
        "fitted last-decade slope {slope:.3} outside [0.35, 0.65]"
    );

    // The same data also satisfies the learner-side ledgers checked by the
    // acceptance gate on the larger spec.
    let rho_star = speedscale::planner::optimal_policy(&spec).unwrap().gain;
    for trace in &outcome.traces {
        for record in &trace.episode_log {
            if record.membership_flag {
                let floor = rho_star - spec.r_max / (record.t_k as f64).sqrt();
                assert!(
                    record.rho_tilde >= floor - 1e-9,
                    "seed {} episode {} gain {} below optimism floor {}",
                    trace.seed,
                    record.k,
                    record.rho_tilde,
                    floor
                );
            }
        }
    }
}
