//! Log-domain arithmetic for products of factorials and sums of positive terms.

use std::sync::OnceLock;

/// Natural logarithm of a nonnegative quantity. `-inf` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(pub f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    pub fn from_value(x: f64) -> Self {
        debug_assert!(x >= 0.0);
        LogWeight(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl std::ops::Mul for LogWeight {
    type Output = LogWeight;
    fn mul(self, rhs: LogWeight) -> LogWeight {
        if self.is_zero() || rhs.is_zero() {
            LogWeight::ZERO
        } else {
            LogWeight(self.0 + rhs.0)
        }
    }
}

const TABLE_LEN: usize = 1025;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Neumaier-compensated running sum of ln k.
        let mut out = Vec::with_capacity(TABLE_LEN);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        out.push(0.0);
        for k in 1..TABLE_LEN {
            let term = (k as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            out.push(sum + comp);
        }
        out
    })
}

/// ln(n!) from a precomputed table; indices past the table continue the sum directly.
pub fn log_factorial(n: usize) -> f64 {
    let t = table();
    if n < t.len() {
        return t[n];
    }
    let mut acc = t[t.len() - 1];
    for k in t.len()..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// ln Σ exp(terms), shifting by the largest term first.
///
/// Returns `-inf` when every term is `-inf` (and for an empty slice).
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + s.ln()
}

/// `count * ln_x` with the convention x⁰ = 1 even when `ln_x` is `-inf`.
pub(crate) fn pow_ln(count: usize, ln_x: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        let exact: f64 = 3_628_800.0;
        assert!((log_factorial(10) - exact.ln()).abs() < 1e-14);
        assert!((log_factorial(10) - 15.104_412_573_075_516).abs() < 1e-12);
    }

    #[test]
    fn factorials_match_integer_products() {
        let mut prod: u128 = 1;
        for n in 1..=33u32 {
            prod *= n as u128;
            let expected = (prod as f64).ln();
            let rel = (log_factorial(n as usize) - expected).abs() / expected.max(1.0);
            assert!(rel < 1e-14, "n={n} rel={rel}");
        }
    }

    #[test]
    fn factorials_match_stirling_series() {
        // Stirling series with five correction terms is accurate to ~1e-17 relative for n >= 30.
        for n in [30usize, 64, 100, 177, 250, 333, 400, 1024, 1500] {
            let x = n as f64;
            let series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3)) + 1.0 / (1260.0 * x.powi(5))
                - 1.0 / (1680.0 * x.powi(7))
                + 1.0 / (1188.0 * x.powi(9));
            let stirling = x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series;
            let rel = (log_factorial(n) - stirling).abs() / stirling;
            assert!(rel < 1e-13, "n={n} rel={rel}");
        }
    }

    #[test]
    fn lse_examples() {
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[700.0, 700.0, 700.0]);
        assert!((v - (700.0 + 3f64.ln())).abs() < 1e-12);
        assert!(v.is_finite());
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 1.5]), 1.5);
    }

    #[test]
    fn log_weight_product_handles_zero() {
        let z = LogWeight::ZERO * LogWeight(3.0);
        assert!(z.is_zero());
        assert_eq!((LogWeight::ONE * LogWeight::from_value(2.0)).value(), 2.0);
    }
}
