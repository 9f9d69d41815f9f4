//! Thomas elimination for the anchored tridiagonal systems that show up in
//! birth-death evaluation: Bellman/first-passage rows everywhere except one
//! anchor row that pins a single unknown (`x[anchor] = value`). The matrices
//! are weakly diagonally dominant M-matrices, for which elimination without
//! pivoting is stable and every pivot stays strictly positive.

/// Solves the system whose row `i != anchor` reads
/// `sub[i] * x[i-1] + diag[i] * x[i] + sup[i] * x[i+1] = rhs[i]`
/// (out-of-range terms ignored) and whose row `anchor` is replaced by
/// `x[anchor] = anchor_value`.
pub(crate) fn solve_anchored(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
    anchor: usize,
    anchor_value: f64,
) -> Vec<f64> {
    let n = diag.len();
    assert!(n > 0 && sub.len() == n && sup.len() == n && rhs.len() == n && anchor < n);

    let mut a = sub.to_vec();
    let mut b = diag.to_vec();
    let mut c = sup.to_vec();
    let mut d = rhs.to_vec();
    a[anchor] = 0.0;
    b[anchor] = 1.0;
    c[anchor] = 0.0;
    d[anchor] = anchor_value;

    // Forward sweep.
    for i in 1..n {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    // Back substitution.
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1] / b[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    }
    x
}
