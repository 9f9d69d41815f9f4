//! Brute-force reference implementations used to validate the closed-form
//! and structured solvers. Everything here is deliberately slow and simple:
//! dense matrices, exhaustive enumeration, grid search. None of it shares
//! code with the fast paths it checks, so an agreement between the two
//! routes is meaningful evidence rather than a tautology.

use crate::mdp::{MdpSpec, Policy};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("kernel row {row} is not a probability distribution")]
    RowNotStochastic { row: usize },
    #[error("kernel is not irreducible; power iteration needs a single recurrent class")]
    NotIrreducible,
    #[error("power iteration failed to converge within {cap} sweeps")]
    NoConvergence { cap: usize },
    #[error("policy enumeration would visit {count} policies, cap is {cap}")]
    PolicyCapExceeded { count: u128, cap: u128 },
    #[error("first-passage system is singular")]
    SingularSystem,
}

/// Successive-substitution tolerance: stop when `||m P - m||_1` drops below
/// this. Chosen so that, after the contraction-factor inflation of a slowly
/// mixing chain, the fixed point is still well inside 1e-10.
pub const POWER_ITERATION_TOL: f64 = 1e-13;
pub const POWER_ITERATION_CAP: usize = 1_000_000;

/// Stationary distribution of a dense stochastic kernel by repeated
/// right-multiplication from the uniform start.
pub fn power_iteration_measure(kernel: &[Vec<f64>]) -> Result<Vec<f64>, OracleError> {
    let n = kernel.len();
    for (i, row) in kernel.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if row.len() != n || row.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(OracleError::RowNotStochastic { row: i });
        }
    }
    if !is_irreducible(kernel) {
        return Err(OracleError::NotIrreducible);
    }

    let mut m = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_ITERATION_CAP {
        for x in next.iter_mut() {
            *x = 0.0;
        }
        for (i, row) in kernel.iter().enumerate() {
            let mi = m[i];
            if mi == 0.0 {
                continue;
            }
            for (j, p) in row.iter().enumerate() {
                next[j] += mi * p;
            }
        }
        let norm: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= norm;
        }
        let diff: f64 = m.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut m, &mut next);
        if diff < POWER_ITERATION_TOL {
            return Ok(m);
        }
    }
    Err(OracleError::NoConvergence {
        cap: POWER_ITERATION_CAP,
    })
}

fn is_irreducible(kernel: &[Vec<f64>]) -> bool {
    let n = kernel.len();
    let forward = |from: usize, transpose: bool| -> usize {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let p = if transpose { kernel[j][i] } else { kernel[i][j] };
                if i != j && p > 0.0 && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count
    };
    forward(0, false) == n && forward(0, true) == n
}

/// Solves the dense linear system `matrix * x = rhs` by Gaussian
/// elimination with partial pivoting. Quadratic storage, cubic time: meant
/// for reference checks, not production paths.
pub fn solve_dense(matrix: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>, OracleError> {
    let m = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == m) && rhs.len() == m);
    let mut a = vec![vec![0.0; m + 1]; m];
    for (row, (coeffs, b)) in matrix.iter().zip(rhs.iter()).enumerate() {
        a[row][..m].copy_from_slice(coeffs);
        a[row][m] = *b;
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(OracleError::SingularSystem);
        }
        a.swap(col, pivot);
        for row in col + 1..m {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..=m {
                    a[row][k] -= factor * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = a[row][m];
        for k in row + 1..m {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Expected steps to first reach `target` from every state, by dense
/// Gaussian elimination on the `(I - Q) v = 1` system over non-target states.
pub fn expected_hitting_dense(kernel: &[Vec<f64>], target: usize) -> Result<Vec<f64>, OracleError> {
    let n = kernel.len();
    let others: Vec<usize> = (0..n).filter(|&s| s != target).collect();
    let m = others.len();
    let mut a = vec![vec![0.0; m]; m];
    for (ri, &i) in others.iter().enumerate() {
        for (ci, &j) in others.iter().enumerate() {
            a[ri][ci] = if i == j { 1.0 - kernel[i][j] } else { -kernel[i][j] };
        }
    }
    let v = solve_dense(&a, &vec![1.0; m])?;
    let mut times = vec![0.0; n];
    for (ri, &i) in others.iter().enumerate() {
        times[i] = v[ri];
    }
    Ok(times)
}

pub const POLICY_ENUMERATION_CAP: u128 = 100_000;

/// Every deterministic stationary policy of `spec`, in lexicographic order.
/// Errors out instead of materializing more than [`POLICY_ENUMERATION_CAP`].
pub fn all_policies(spec: &MdpSpec) -> Result<Vec<Policy>, OracleError> {
    let n = spec.num_states();
    let a = spec.num_actions() as u128;
    let count = a.checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > POLICY_ENUMERATION_CAP {
        return Err(OracleError::PolicyCapExceeded {
            count,
            cap: POLICY_ENUMERATION_CAP,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0usize; n];
    loop {
        out.push(current.clone());
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(out);
            }
            current[pos] += 1;
            if current[pos] < spec.num_actions() {
                break;
            }
            current[pos] = 0;
            pos += 1;
        }
    }
}

/// Diameter by exhaustive enumeration: for every ordered pair of distinct
/// states, minimize the expected first-passage time over all policies, then
/// take the worst pair.
pub fn enumerate_diameter(spec: &MdpSpec) -> Result<f64, OracleError> {
    let n = spec.num_states();
    let policies = all_policies(spec)?;
    let mut best = vec![vec![f64::INFINITY; n]; n];
    for policy in &policies {
        let kernel = spec.dense_kernel(policy);
        for target in 0..n {
            let times = expected_hitting_dense(&kernel, target)?;
            for s in 0..n {
                if s != target && times[s] < best[s][target] {
                    best[s][target] = times[s];
                }
            }
        }
    }
    let mut diameter = 0.0f64;
    for s in 0..n {
        for t in 0..n {
            if s != t {
                diameter = diameter.max(best[s][t]);
            }
        }
    }
    Ok(diameter)
}

/// Maximizes `q . u` over distributions `q` on the same support as `p_hat`
/// with `||q - p_hat||_1 <= radius`, by exhaustive search on the simplex grid
/// with the given resolution. Returns the best grid point and its value.
pub fn grid_inner_max(p_hat: &[f64], radius: f64, u: &[f64], step: f64) -> (Vec<f64>, f64) {
    assert_eq!(p_hat.len(), u.len());
    assert!(step > 0.0 && step <= 1.0);
    let k = p_hat.len();
    let n = (1.0 / step).round() as usize;
    let mut best_q = p_hat.to_vec();
    let mut best_v = f64::NEG_INFINITY;
    let mut counts = vec![0usize; k];
    search(
        &mut counts,
        0,
        n,
        &mut |counts: &[usize]| {
            let q: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
            let l1: f64 = q.iter().zip(p_hat).map(|(a, b)| (a - b).abs()).sum();
            if l1 <= radius + 1e-12 {
                let v: f64 = q.iter().zip(u).map(|(a, b)| a * b).sum();
                if v > best_v {
                    best_v = v;
                    best_q = q;
                }
            }
        },
    );
    (best_q, best_v)
}

/// Recursively enumerates nonnegative integer vectors summing to `n`.
fn search(counts: &mut Vec<usize>, pos: usize, remaining: usize, visit: &mut impl FnMut(&[usize])) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        search(counts, pos + 1, remaining - c, visit);
    }
}

/// State distributions `mu_0, mu_1, ..., mu_horizon` under `policy`, computed
/// by exact row-vector propagation (no sampling).
pub fn exact_distribution_propagation(
    spec: &MdpSpec,
    policy: &[usize],
    horizon: usize,
    initial: &[f64],
) -> Vec<Vec<f64>> {
    let n = spec.num_states();
    assert_eq!(policy.len(), n);
    assert_eq!(initial.len(), n);
    let rows: Vec<_> = (0..n).map(|s| spec.transition_row(s, policy[s])).collect();
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(initial.to_vec());
    let mut current = initial.to_vec();
    for _ in 0..horizon {
        let mut next = vec![0.0; n];
        for s in 0..n {
            let mass = current[s];
            if mass == 0.0 {
                continue;
            }
            let row = rows[s];
            if s > 0 {
                next[s - 1] += mass * row.down;
            }
            next[s] += mass * row.stay;
            if s + 1 < n {
                next[s + 1] += mass * row.up;
            }
        }
        out.push(next.clone());
        current = next;
    }
    out
}

/// Upper-tail sums `P(X >= s)` for `s = 0..n`; the standard certificate for
/// stochastic dominance comparisons.
pub fn tail_sums(dist: &[f64]) -> Vec<f64> {
    let mut tails = vec![0.0; dist.len()];
    let mut acc = 0.0;
    for s in (0..dist.len()).rev() {
        acc += dist[s];
        tails[s] = acc;
    }
    tails
}
