//! LLR-domain building blocks shared by the SC and SCL decoders.
//!
//! Positive LLRs favour bit 0. A node of size `2h` holds the LLRs of its
//! two halves; the left child sees `f(a, b)`, and once its partial sums `s`
//! are known the right child sees `b + (1 − 2s)·a`.

use serde::{Deserialize, Serialize};

/// Check-node rule and matching path-metric increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    /// `sign(a)·sign(b)·min(|a|,|b|)` with penalty `|λ|` on disagreement.
    #[default]
    MinSum,
    /// `2·atanh(tanh(a/2)·tanh(b/2))` with penalty `ln(1 + e^{−(1−2u)λ})`.
    Exact,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl Arithmetic {
    #[inline]
    pub fn check(self, a: f64, b: f64) -> f64 {
        let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
        let min = a.abs().min(b.abs());
        match self {
            Arithmetic::MinSum => sign * min,
            Arithmetic::Exact => {
                sign * min + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
            }
        }
    }

    /// Path-metric increment for deciding `bit` against LLR `llr`.
    #[inline]
    pub fn penalty(self, llr: f64, bit: u8) -> f64 {
        let signed = if bit == 0 { llr } else { -llr };
        match self {
            Arithmetic::MinSum => {
                if signed < 0.0 {
                    -signed
                } else {
                    0.0
                }
            }
            Arithmetic::Exact => softplus(-signed),
        }
    }
}

#[inline]
pub fn variable(a: f64, b: f64, s: u8) -> f64 {
    if s == 0 {
        b + a
    } else {
        b - a
    }
}

/// Left-child LLRs from a parent of twice the length.
pub fn f_layer(out: &mut [f64], parent: &[f64], arith: Arithmetic) {
    let h = out.len();
    let (a, b) = parent.split_at(h);
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = arith.check(x, y);
    }
}

/// Right-child LLRs given the left child's partial sums.
pub fn g_layer(out: &mut [f64], parent: &[f64], left: &[u8]) {
    let h = out.len();
    let (a, b) = parent.split_at(h);
    for (((o, &x), &y), &s) in out.iter_mut().zip(a).zip(b).zip(left) {
        *o = variable(x, y, s);
    }
}

/// Partial sums of a parent from those of its two children.
pub fn combine(out: &mut [u8], left: &[u8], right: &[u8]) {
    let h = left.len();
    let (lo, hi) = out.split_at_mut(h);
    for ((o, &l), &r) in lo.iter_mut().zip(left).zip(right) {
        *o = l ^ r;
    }
    hi.copy_from_slice(right);
}

/// Hard decision: 1 iff the LLR is negative.
#[inline]
pub fn hard(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_reference(a: f64, b: f64) -> f64 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    }

    #[test]
    fn exact_check_matches_tanh_rule() {
        for &a in &[-7.0, -1.5, -0.2, 0.3, 2.0, 6.5] {
            for &b in &[-4.0, -0.7, 0.1, 1.0, 3.3] {
                let got = Arithmetic::Exact.check(a, b);
                assert!((got - exact_reference(a, b)).abs() < 1e-9, "{a} {b}");
                assert!(got.abs() <= a.abs().min(b.abs()) + 1e-12);
            }
        }
        assert!(Arithmetic::Exact.check(300.0, -300.0).is_finite());
    }

    #[test]
    fn penalties() {
        assert_eq!(Arithmetic::MinSum.penalty(2.0, 0), 0.0);
        assert_eq!(Arithmetic::MinSum.penalty(2.0, 1), 2.0);
        assert_eq!(Arithmetic::MinSum.penalty(-3.0, 0), 3.0);
        let p = Arithmetic::Exact.penalty(2.0, 1);
        assert!((p - (1.0f64 + 2f64.exp()).ln()).abs() < 1e-12);
        assert!(Arithmetic::Exact.penalty(800.0, 1).is_finite());
    }
}
