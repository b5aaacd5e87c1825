//! Truncated power series over `f64`.
//!
//! A [`PowerSeries`] holds the coefficients `c_0..=c_N` of
//! `c_0 + c_1 s + ... + c_N s^N`. Every operation takes the output truncation
//! order explicitly; coefficients missing from an operand are read as zero.
//!
//! Probability generating functions and their logarithms are carried as
//! power series throughout the crate: the compound Poisson PMF is the
//! exponential of a series, and the signed batch-rate representation of an
//! arbitrary law is the logarithm of its PMF.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    /// Builds a series from `c_0..=c_N`. The order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![0.0; order + 1],
        }
    }

    /// The multiplicative identity `1 + 0 s + ... + 0 s^order`.
    pub fn unit(order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = 1.0;
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `s^k`; zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Re-truncates (or zero-pads) to order `n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self {
            coeffs: (0..=n).map(|k| self.coeff(k)).collect(),
        }
    }

    /// Value of the truncated polynomial at `s` (Horner).
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Coefficient-wise sum, truncated to order `n`.
    pub fn add(&self, other: &Self, n: usize) -> Self {
        Self {
            coeffs: (0..=n).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        }
    }

    /// Cauchy product truncated to order `n`.
    pub fn mul(&self, other: &Self, n: usize) -> Self {
        let coeffs = (0..=n)
            .map(|k| {
                let lo = k.saturating_sub(other.order());
                let hi = k.min(self.order());
                if lo > hi {
                    return 0.0;
                }
                (lo..=hi).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum()
            })
            .collect();
        Self { coeffs }
    }

    /// `self^k` by repeated squaring, truncated to order `n`. `k = 0` gives the unit series.
    pub fn pow(&self, k: u32, n: usize) -> Self {
        let mut result = Self::unit(n);
        let mut base = self.truncate(n);
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, n);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, n);
            }
        }
        result
    }

    /// `exp(self)` truncated to order `n`.
    ///
    /// `e_0 = exp(a_0)`, and for `k >= 1`, `k e_k = sum_{j=1}^{k} j a_j e_{k-j}`.
    pub fn exp(&self, n: usize) -> Result<Self> {
        let e0 = self.coeffs[0].exp();
        if !e0.is_finite() {
            return Err(Error::ExpOverflow(self.coeffs[0]));
        }
        let mut out = Vec::with_capacity(n + 1);
        out.push(e0);
        for k in 1..=n {
            let top = k.min(self.order());
            let mut acc = 0.0;
            for j in 1..=top {
                acc += j as f64 * self.coeffs[j] * out[k - j];
            }
            out.push(acc / k as f64);
        }
        Ok(Self { coeffs: out })
    }

    /// Natural logarithm truncated to order `n`. Requires `a_0 > 0`.
    ///
    /// `b_0 = ln a_0`, and for `k >= 1`,
    /// `k b_k = (k a_k - sum_{j=1}^{k-1} j b_j a_{k-j}) / a_0`.
    pub fn ln(&self, n: usize) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::NonPositiveConstant(a0));
        }
        let mut out = Vec::with_capacity(n + 1);
        out.push(a0.ln());
        for k in 1..=n {
            let mut acc = k as f64 * self.coeff(k);
            let lo = k.saturating_sub(self.order()).max(1);
            for j in lo..k {
                acc -= j as f64 * out[j] * self.coeffs[k - j];
            }
            out.push(acc / (a0 * k as f64));
        }
        Ok(Self { coeffs: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(c: &[f64]) -> PowerSeries {
        PowerSeries::new(c.to_vec()).unwrap()
    }

    fn max_diff(a: &PowerSeries, b: &PowerSeries) -> f64 {
        let n = a.order().max(b.order());
        (0..=n).map(|k| (a.coeff(k) - b.coeff(k)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(PowerSeries::new(vec![]), Err(Error::EmptySeries));
        assert!(matches!(
            PowerSeries::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(ps(&[1.0, 1.0]).mul(&ps(&[1.0, -1.0]), 2).coeffs(), &[1.0, 0.0, -1.0]);
        let a = ps(&[0.3, -0.2, 0.7]);
        assert_eq!(a.mul(&ps(&[1.0]), 2), a);
        assert_eq!(ps(&[0.5, 0.5]).mul(&ps(&[0.5, 0.5]), 2).coeffs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn mul_truncates_and_pads() {
        let a = ps(&[1.0, 2.0, 3.0]);
        assert_eq!(a.mul(&a, 1).coeffs(), &[1.0, 4.0]);
        assert_eq!(ps(&[2.0]).mul(&ps(&[3.0]), 3).coeffs(), &[6.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pow_examples() {
        let a = ps(&[0.6, 0.4]);
        assert_eq!(a.pow(0, 3), PowerSeries::unit(3));
        assert_eq!(a.pow(1, 1), a);
        let sq = a.pow(2, 2);
        for (got, want) in sq.coeffs().iter().zip([0.36, 0.48, 0.16]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_examples() {
        assert_eq!(PowerSeries::zero(3).exp(3).unwrap(), PowerSeries::unit(3));
        let e = (-1.0f64).exp();
        let got = ps(&[-1.0, 1.0, 0.0, 0.0]).exp(3).unwrap();
        for (g, w) in got.coeffs().iter().zip([e, e, e / 2.0, e / 6.0]) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_overflow_is_reported() {
        assert_eq!(ps(&[1000.0]).exp(2), Err(Error::ExpOverflow(1000.0)));
    }

    #[test]
    fn ln_examples() {
        assert!(max_diff(&PowerSeries::unit(5).ln(5).unwrap(), &PowerSeries::zero(5)) == 0.0);

        let p: f64 = 0.7;
        let b = ps(&[p, 1.0 - p]).ln(4).unwrap();
        assert!((b.coeff(0) - p.ln()).abs() < 1e-15);
        let ratio = 3.0 / 7.0;
        for k in 1..=4 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let want = sign / k as f64 * f64::powi(ratio, k as i32);
            assert!((b.coeff(k) - want).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn ln_of_truncated_poisson_pmf() {
        let pmf = ps(&[-1.0, 1.0]).exp(6).unwrap();
        let b = pmf.ln(6).unwrap();
        let want = [-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (k, w) in want.iter().enumerate() {
            assert!((b.coeff(k) - w).abs() < 1e-14, "k={k}: {}", b.coeff(k));
        }
    }

    #[test]
    fn ln_rejects_non_positive_constant() {
        assert_eq!(ps(&[0.0, 1.0]).ln(3), Err(Error::NonPositiveConstant(0.0)));
        assert_eq!(ps(&[-0.5, 1.0]).ln(3), Err(Error::NonPositiveConstant(-0.5)));
    }

    #[test]
    fn eval_matches_direct_sum() {
        let a = ps(&[1.0, -2.0, 0.5]);
        assert!((a.eval(0.5) - (1.0 - 1.0 + 0.125)).abs() < 1e-15);
    }

    fn coeff_vec(max_order: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, 1..=max_order + 1)
    }

    proptest! {
        #[test]
        fn exp_ln_round_trip(a0 in 0.05f64..1.0, rest in prop::collection::vec(-1.0f64..1.0, 0..=16)) {
            let mut c = vec![a0];
            c.extend(rest);
            let a = ps(&c);
            let n = a.order();
            let back = a.ln(n).unwrap().exp(n).unwrap();
            // Relative to the growth of the log coefficients, which scale like (1/a0)^k.
            let scale = (1.0 / a0).powi(n as i32).max(1.0);
            prop_assert!(max_diff(&back, &a) <= 1e-12 * scale, "diff {}", max_diff(&back, &a));
        }

        #[test]
        fn exp_ln_round_trip_dominant_constant(a0 in 0.5f64..1.0, rest in prop::collection::vec(-0.03f64..0.03, 0..=16)) {
            let mut c = vec![a0];
            c.extend(rest);
            let a = ps(&c);
            let n = a.order();
            let back = a.ln(n).unwrap().exp(n).unwrap();
            prop_assert!(max_diff(&back, &a) <= 1e-12);
        }

        #[test]
        fn mul_commutes_and_associates(a in coeff_vec(12), b in coeff_vec(12), c in coeff_vec(12)) {
            let (a, b, c) = (ps(&a), ps(&b), ps(&c));
            let n = 12;
            prop_assert!(max_diff(&a.mul(&b, n), &b.mul(&a, n)) <= 1e-14);
            let left = a.mul(&b, n).mul(&c, n);
            let right = a.mul(&b.mul(&c, n), n);
            prop_assert!(max_diff(&left, &right) <= 1e-14 * 16.0);
        }

        #[test]
        fn pow_matches_repeated_mul(a in coeff_vec(8), k in 0u32..7) {
            let a = ps(&a);
            let n = 10;
            let mut expected = PowerSeries::unit(n);
            for _ in 0..k {
                expected = expected.mul(&a, n);
            }
            let got = a.pow(k, n);
            let scale = (0..=n).map(|i| expected.coeff(i).abs()).fold(1.0, f64::max);
            prop_assert!(max_diff(&got, &expected) <= 1e-12 * scale);
        }

        #[test]
        fn exp_of_compound_exponent_is_sub_probability(rates in prop::collection::vec(0.0f64..1.0, 1..6)) {
            let total: f64 = rates.iter().sum();
            let mut c = vec![-total];
            c.extend(&rates);
            let p = ps(&c).exp(40).unwrap();
            prop_assert!(p.coeffs().iter().all(|&x| x >= 0.0));
            prop_assert!(p.coeffs().iter().sum::<f64>() <= 1.0 + 1e-12);
        }
    }
}
