//! Log-domain arithmetic for quantities that outgrow `f64`. Idle-ascent
//! first-passage times scale like `S^(S-2)`, so diameters and the bound
//! constants built from them overflow double precision near `S ~ 150`; all
//! such quantities are carried as natural logarithms and only exponentiated
//! when they fit.

use serde::{Deserialize, Serialize};

/// `ln(e^a + e^b)` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum_i exp(v_i))` without overflow.
pub fn ln_sum_exp(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    let sum: f64 = values.iter().map(|v| (v - hi).exp()).sum();
    hi + sum.ln()
}

/// Natural log of `n!` by direct summation; exact enough (relative error
/// ~1e-15) for the state counts this crate handles.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Natural log of the binomial coefficient `C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Threshold on `|ln|` below which `exp(ln)` keeps full precision in `f64`.
const LINEAR_LIMIT_LN: f64 = 700.0;

/// A positive scalar that may exceed floating-point range. When `log_scale`
/// is false, `value` is the quantity itself; when true, `value` is its
/// natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaled {
    pub value: f64,
    pub log_scale: bool,
}

impl LogScaled {
    pub fn from_ln(ln: f64) -> Self {
        if ln.abs() <= LINEAR_LIMIT_LN {
            LogScaled {
                value: ln.exp(),
                log_scale: false,
            }
        } else {
            LogScaled {
                value: ln,
                log_scale: true,
            }
        }
    }

    pub fn from_value(value: f64) -> Self {
        assert!(value > 0.0 && value.is_finite());
        LogScaled {
            value,
            log_scale: false,
        }
    }

    pub fn ln(&self) -> f64 {
        if self.log_scale {
            self.value
        } else {
            self.value.ln()
        }
    }

    /// The plain value; saturates to `inf` (or `0` for tiny quantities)
    /// when it does not fit in `f64` with full precision.
    pub fn linear(&self) -> f64 {
        if self.log_scale {
            if self.value > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            self.value
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_add_exp_agrees_with_direct_sum() {
        let a: f64 = 3.7;
        let b: f64 = 1.2;
        assert!((ln_add_exp(a.ln(), b.ln()) - (a + b).ln()).abs() < 1e-14);
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 2.0), 2.0);
    }

    #[test]
    fn ln_add_exp_handles_huge_exponents() {
        let v = ln_add_exp(1000.0, 1000.0);
        assert!((v - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn ln_sum_exp_matches_pairwise() {
        let logs = [0.3f64, -2.0, 5.5, 1.1];
        let direct: f64 = logs.iter().map(|l| l.exp()).sum::<f64>().ln();
        assert!((ln_sum_exp(&logs) - direct).abs() < 1e-13);
    }

    #[test]
    fn binomials_are_exact_at_small_sizes() {
        assert!((ln_binomial(2, 1) - 2.0f64.ln()).abs() < 1e-14);
        assert!((ln_binomial(7, 3) - 35.0f64.ln()).abs() < 1e-13);
        assert_eq!(ln_binomial(5, 0), 0.0);
    }

    #[test]
    fn log_scaled_switches_representation() {
        let small = LogScaled::from_ln(10.0);
        assert!(!small.log_scale);
        assert!((small.value - 10.0f64.exp()).abs() < 1e-9);
        assert!((small.ln() - 10.0).abs() < 1e-14);

        let huge = LogScaled::from_ln(1234.5);
        assert!(huge.log_scale);
        assert_eq!(huge.value, 1234.5);
        assert_eq!(huge.ln(), 1234.5);
        assert_eq!(huge.linear(), f64::INFINITY);

        let tiny = LogScaled::from_ln(-1234.5);
        assert!(tiny.log_scale);
        assert_eq!(tiny.ln(), -1234.5);
        assert_eq!(tiny.linear(), 0.0);
    }
}
