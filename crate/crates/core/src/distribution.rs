//! Stuttering Poisson laws and their signed generalization.
//!
//! A law is described by its batch rates `theta_i = alpha_i * lambda * t`: the
//! Poisson intensity of batches of exactly `i` events over the observation
//! window. Its generating function is `exp(sum_i theta_i (s^i - 1))`, so the
//! PMF is the exponential of the series `-sum(theta) + theta_1 s + ... + theta_r s^r`
//! and the cumulants are `kappa_n = sum_i theta_i i^n`.
//!
//! [`SpdParams`] requires nonnegative rates; [`GspdParams`] allows signed rates
//! with a positive total, which covers every law with `P(X = 0) > 0.5`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::series::PowerSeries;

/// Absolute tolerance below which a signed PMF entry counts as negative.
pub const NEGATIVITY_TOL: f64 = 1e-12;

/// Largest total rate for which `exp(-total)` stays a normal `f64`.
const MAX_TOTAL_RATE: f64 = 708.0;

/// Read access to a batch-rate vector `theta_1..theta_r`.
pub trait BatchRates {
    /// `theta_1..theta_r`; index 0 holds the rate of batches of size 1.
    fn rates(&self) -> &[f64];

    /// Largest stored batch size `r`.
    fn order(&self) -> usize {
        self.rates().len()
    }

    /// `lambda * t = sum(theta_i)`.
    fn total_rate(&self) -> f64 {
        self.rates().iter().sum()
    }

    /// Batch-size weights `alpha_i = theta_i / sum(theta)`.
    fn alphas(&self) -> Vec<f64> {
        let total = self.total_rate();
        self.rates().iter().map(|t| t / total).collect()
    }
}

fn check_finite(theta: &[f64]) -> Result<()> {
    match theta.iter().enumerate().find(|(_, t)| !t.is_finite()) {
        Some((index, &value)) => Err(Error::NonFinite { index, value }),
        None => Ok(()),
    }
}

/// Nonnegative batch rates of an r-th stuttering Poisson law.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdParams {
    theta: Vec<f64>,
}

impl SpdParams {
    /// Requires `theta_i >= 0` and `theta_r > 0`.
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidRates("at least one batch rate is required".into()));
        }
        check_finite(&theta)?;
        if let Some((i, t)) = theta.iter().enumerate().find(|(_, &t)| t < 0.0) {
            return Err(Error::InvalidRates(format!(
                "rate for batch size {} is negative ({t})",
                i + 1
            )));
        }
        if *theta.last().unwrap() <= 0.0 {
            return Err(Error::InvalidRates(format!(
                "rate of the largest batch size {} must be positive",
                theta.len()
            )));
        }
        Ok(Self { theta })
    }

    /// From batch-size probabilities `alpha`, event rate `lambda` and window `t`.
    pub fn from_batch_probs(alpha: &[f64], lambda: f64, t: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) || !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} and t = {t} must be positive"
            )));
        }
        let sum: f64 = alpha.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidRates("batch probabilities sum to zero".into()));
        }
        Self::new(alpha.iter().map(|a| a / sum * lambda * t).collect())
    }

    /// Rates `theta_i / k`: the k-th convolution root of the law.
    pub fn divide(&self, k: u32) -> Self {
        assert!(k >= 1, "divisor must be positive");
        Self {
            theta: self.theta.iter().map(|t| t / k as f64).collect(),
        }
    }
}

impl BatchRates for SpdParams {
    fn rates(&self) -> &[f64] {
        &self.theta
    }
}

/// Signed batch rates with positive total.
#[derive(Debug, Clone, PartialEq)]
pub struct GspdParams {
    theta: Vec<f64>,
}

impl GspdParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidRates("at least one batch rate is required".into()));
        }
        check_finite(&theta)?;
        let total: f64 = theta.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidRates(format!("total rate {total} must be positive")));
        }
        Ok(Self { theta })
    }

    pub fn divide(&self, k: u32) -> Self {
        assert!(k >= 1, "divisor must be positive");
        Self {
            theta: self.theta.iter().map(|t| t / k as f64).collect(),
        }
    }

    /// True when every rate is nonnegative, i.e. the law is an ordinary SPD.
    pub fn is_nonnegative(&self) -> bool {
        self.theta.iter().all(|&t| t >= 0.0)
    }

    /// `sum |theta_i|`.
    pub fn absolute_mass(&self) -> f64 {
        self.theta.iter().map(|t| t.abs()).sum()
    }
}

impl BatchRates for GspdParams {
    fn rates(&self) -> &[f64] {
        &self.theta
    }
}

impl From<SpdParams> for GspdParams {
    fn from(p: SpdParams) -> Self {
        Self { theta: p.theta }
    }
}

/// The exponent series `-total + theta_1 s + ... + theta_r s^r`.
fn exponent_series<P: BatchRates + ?Sized>(params: &P) -> Result<PowerSeries> {
    let mut c = Vec::with_capacity(params.order() + 1);
    c.push(-params.total_rate());
    c.extend_from_slice(params.rates());
    PowerSeries::new(c)
}

/// `P_0..=P_{n_max}` by the compound Poisson recursion
/// `P_0 = exp(-sum theta)`, `(j+1) P_{j+1} = sum_{i=1}^{min(j+1, r)} i theta_i P_{j+1-i}`.
///
/// For signed rates the output may contain negative entries; see [`pmf_checked`].
pub fn pmf<P: BatchRates + ?Sized>(params: &P, n_max: usize) -> Result<Vec<f64>> {
    let total = params.total_rate();
    if total > MAX_TOTAL_RATE {
        return Err(Error::RateTooLarge(total));
    }
    Ok(exponent_series(params)?.exp(n_max)?.into_coeffs())
}

/// PMF of a signed law together with the bins that fall below `-NEGATIVITY_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPmf {
    pub probs: Vec<f64>,
    pub negative_bins: Vec<usize>,
}

impl SignedPmf {
    /// False when some entry is genuinely negative: the rates do not describe a probability law.
    pub fn is_probability_law(&self) -> bool {
        self.negative_bins.is_empty()
    }
}

pub fn pmf_checked(params: &GspdParams, n_max: usize) -> Result<SignedPmf> {
    let probs = pmf(params, n_max)?;
    let negative_bins = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p < -NEGATIVITY_TOL)
        .map(|(i, _)| i)
        .collect();
    Ok(SignedPmf { probs, negative_bins })
}

/// Independent PMF evaluation by expanding the exponential directly:
/// `P_n = exp(-total) [s^n] sum_k G(s)^k / k!` with `G(s) = sum theta_i s^i`.
///
/// Since `G` has no constant term, `G^k` contributes nothing below `s^k`, so
/// the sum over `k` is exact once `k` reaches `n_max`; it stops earlier as soon
/// as the majorant `sum_{k > K} (sum |theta|)^k / k!` drops below `1e-15`.
pub fn pmf_oracle<P: BatchRates + ?Sized>(params: &P, n_max: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend_from_slice(params.rates());
    let g = PowerSeries::new(g).expect("rates are finite");
    let mass: f64 = params.rates().iter().map(|t| t.abs()).sum();

    let mut acc = PowerSeries::unit(n_max);
    let mut term = PowerSeries::unit(n_max);
    // Poisson-style majorant of the neglected terms, maintained incrementally.
    let mut majorant_term = 1.0;
    let mut majorant_tail = mass.exp() - 1.0;
    for k in 1..=n_max {
        if majorant_tail < 1e-15 {
            break;
        }
        term = term.mul(&g, n_max).scale(1.0 / k as f64);
        acc = acc.add(&term, n_max);
        majorant_term *= mass / k as f64;
        majorant_tail -= majorant_term;
    }
    let p0 = (-params.total_rate()).exp();
    acc.scale(p0).into_coeffs()
}

/// `E[s^X] = exp(sum theta_i (s^i - 1))` for `|s| <= 1`.
pub fn pgf<P: BatchRates + ?Sized>(params: &P, s: f64) -> Result<f64> {
    if !(s.abs() <= 1.0) {
        return Err(Error::PgfDomain(s));
    }
    let exponent: f64 = params
        .rates()
        .iter()
        .enumerate()
        .map(|(i, t)| t * (s.powi(i as i32 + 1) - 1.0))
        .sum();
    Ok(exponent.exp())
}

/// `kappa_n = sum_i theta_i i^n`.
pub fn cumulant<P: BatchRates + ?Sized>(params: &P, n: u32) -> f64 {
    assert!(n >= 1, "cumulant order starts at 1");
    params
        .rates()
        .iter()
        .enumerate()
        .map(|(i, t)| t * ((i + 1) as f64).powi(n as i32))
        .sum()
}

/// `kappa_1..=kappa_n`.
pub fn cumulants<P: BatchRates + ?Sized>(params: &P, n: usize) -> Vec<f64> {
    (1..=n as u32).map(|k| cumulant(params, k)).collect()
}

/// Pascal triangle rows `0..=n`.
pub(crate) fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![1.0; i + 1];
        for j in 1..i {
            row[j] = rows[i - 1][j - 1] + rows[i - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// Raw moments `m_1..=m_n` from cumulants `kappa_1..=kappa_n`:
/// `m_0 = 1`, `m_{n+1} = sum_{j=0}^{n} C(n, j) kappa_{n+1-j} m_j`.
pub fn moments_from_cumulants(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    let binom = binomial_table(n);
    let mut m = Vec::with_capacity(n + 1);
    m.push(1.0);
    for k in 0..n {
        let next = (0..=k).map(|j| binom[k][j] * kappa[k - j] * m[j]).sum();
        m.push(next);
    }
    m.split_off(1)
}

/// Inverse of [`moments_from_cumulants`]:
/// `kappa_{n+1} = m_{n+1} - sum_{j=1}^{n} C(n, j) kappa_{n+1-j} m_j`.
pub fn cumulants_from_moments(moments: &[f64]) -> Vec<f64> {
    let n = moments.len();
    let binom = binomial_table(n);
    let m = |j: usize| if j == 0 { 1.0 } else { moments[j - 1] };
    let mut kappa: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        let mut next = m(k + 1);
        for j in 1..=k {
            next -= binom[k][j] * kappa[k - j] * m(j);
        }
        kappa.push(next);
    }
    kappa
}

/// Central moments `c_1..=c_n` from cumulants: the raw-moment recursion with
/// `kappa_1` replaced by zero. `c_1` is therefore always 0.
pub fn central_moments_from_cumulants(kappa: &[f64]) -> Vec<f64> {
    let mut shifted = kappa.to_vec();
    if let Some(first) = shifted.first_mut() {
        *first = 0.0;
    }
    moments_from_cumulants(&shifted)
}

pub fn raw_moments<P: BatchRates + ?Sized>(params: &P, n: usize) -> Vec<f64> {
    moments_from_cumulants(&cumulants(params, n))
}

pub fn central_moments<P: BatchRates + ?Sized>(params: &P, n: usize) -> Vec<f64> {
    central_moments_from_cumulants(&cumulants(params, n))
}

/// Draws `count` variates: a Poisson number of batches with batch sizes drawn
/// from `alpha`. Reproducible for a given seed.
pub fn sample(params: &SpdParams, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batches = Poisson::new(params.total_rate()).expect("total rate is positive and finite");
    let sizes = WeightedIndex::new(params.rates()).expect("rates are nonnegative with positive sum");
    (0..count)
        .map(|_| {
            let n: f64 = batches.sample(&mut rng);
            (0..n as u64).map(|_| sizes.sample(&mut rng) as u64 + 1).sum()
        })
        .collect()
}

/// Discrete convolution of two PMF prefixes, truncated to `n_max`.
pub fn convolve(a: &[f64], b: &[f64], n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|k| {
            (0..=k)
                .filter(|&j| j < a.len() && k - j < b.len())
                .map(|j| a[j] * b[k - j])
                .sum()
        })
        .collect()
}

/// `exp(-lambda) lambda^k / k!` for `k = 0..=n_max`; `lambda = 0` is the point mass at 0.
pub fn poisson_pmf(lambda: f64, n_max: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut p = vec![0.0; n_max + 1];
        p[0] = 1.0;
        return p;
    }
    (0..=n_max)
        .map(|k| (-lambda + k as f64 * lambda.ln() - ln_gamma(k as f64 + 1.0)).exp())
        .collect()
}

/// Negative binomial PMF `Gamma(r + k) / (Gamma(r) k!) p^r (1 - p)^k`, evaluated in log space.
pub fn nbd_pmf(r: f64, p: f64, n_max: usize) -> Vec<f64> {
    let log_head = r * p.ln() - ln_gamma(r);
    let log_q = (1.0 - p).ln();
    (0..=n_max)
        .map(|k| {
            let k = k as f64;
            (log_head + ln_gamma(r + k) - ln_gamma(k + 1.0) + k * log_q).exp()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spd(theta: &[f64]) -> SpdParams {
        SpdParams::new(theta.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Brute-force raw moment `sum_j j^k p_j` over a truncated support.
    fn brute_raw(p: &[f64], k: i32) -> f64 {
        p.iter().enumerate().map(|(j, pj)| (j as f64).powi(k) * pj).sum()
    }

    #[test]
    fn params_validation() {
        assert!(SpdParams::new(vec![]).is_err());
        assert!(SpdParams::new(vec![0.5, -0.1, 0.2]).is_err());
        assert!(SpdParams::new(vec![0.5, 0.0]).is_err());
        assert!(SpdParams::new(vec![0.5, f64::INFINITY]).is_err());
        assert!(GspdParams::new(vec![0.2, -0.3]).is_err());
        assert!(GspdParams::new(vec![0.5, -0.2]).is_ok());
    }

    #[test]
    fn from_batch_probs_normalizes() {
        let p = SpdParams::from_batch_probs(&[3.0, 1.0], 2.0, 0.5).unwrap();
        assert_eq!(p.rates(), &[0.75, 0.25]);
        assert!(close(p.total_rate(), 1.0, 1e-15));
        let a = p.alphas();
        assert!(close(a.iter().sum(), 1.0, 1e-15));
    }

    #[test]
    fn pmf_poisson_one() {
        let e = (-1.0f64).exp();
        let got = pmf(&spd(&[1.0]), 3).unwrap();
        for (g, w) in got.iter().zip([e, e, e / 2.0, e / 6.0]) {
            assert!(close(*g, w, 1e-16));
        }
    }

    #[test]
    fn pmf_matches_oracle_hermite() {
        let p = spd(&[0.5, 0.25]);
        let a = pmf(&p, 8).unwrap();
        let b = pmf_oracle(&p, 8);
        for (x, y) in a.iter().zip(&b) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn oracle_hand_expansion() {
        let e = (-1.0f64).exp();
        let got = pmf_oracle(&spd(&[1.0]), 2);
        for (g, w) in got.iter().zip([e, e, e / 2.0]) {
            assert!(close(*g, w, 1e-16));
        }
        let got = pmf_oracle(&spd(&[0.5, 0.25]), 2);
        assert!(close(got[2], (-0.75f64).exp() * 0.375, 1e-16));
    }

    #[test]
    fn pmf_rejects_huge_rate() {
        assert!(matches!(pmf(&spd(&[800.0]), 3), Err(Error::RateTooLarge(_))));
    }

    #[test]
    fn signed_pmf_flags_negative_probabilities() {
        // P_2 = P_0 (0.1^2 / 2 - 0.05) < 0.
        let bad = GspdParams::new(vec![0.1, -0.05]).unwrap();
        let checked = pmf_checked(&bad, 6).unwrap();
        assert!(checked.negative_bins.contains(&2));
        assert!(!checked.is_probability_law());
        let spd_like: GspdParams = spd(&[0.5, 0.25]).into();
        assert!(pmf_checked(&spd_like, 10).unwrap().is_probability_law());
    }

    #[test]
    fn pgf_values() {
        let p = spd(&[0.5, 0.25]);
        assert_eq!(pgf(&p, 1.0).unwrap(), 1.0);
        assert!(close(pgf(&spd(&[1.0]), 0.0).unwrap(), (-1.0f64).exp(), 1e-16));
        assert!(close(pgf(&p, 0.5).unwrap(), (-0.4375f64).exp(), 1e-15));
        assert_eq!(pgf(&p, 1.5), Err(Error::PgfDomain(1.5)));
    }

    #[test]
    fn pgf_agrees_with_pmf_series() {
        let p = spd(&[0.3, 0.1, 0.05]);
        let probs = pmf(&p, 80).unwrap();
        let s: f64 = -0.7;
        let series: f64 = probs.iter().enumerate().map(|(k, q)| q * s.powi(k as i32)).sum();
        assert!(close(pgf(&p, s).unwrap(), series, 1e-14));
    }

    #[test]
    fn cumulant_examples() {
        for n in 1..6 {
            assert_eq!(cumulant(&spd(&[1.0]), n), 1.0);
        }
        // 0.5 * 1^3 + 0.25 * 2^3
        assert_eq!(cumulant(&spd(&[0.5, 0.25]), 3), 2.5);
        let triple = spd(&[0.0954483, 0.0024492, 0.0002446]);
        // The printed rates are rounded to 7 decimals.
        assert!(close(cumulant(&triple, 1), 0.1010806, 2e-7));
    }

    #[test]
    fn moments_from_cumulants_examples() {
        // Poisson(1): brute force from the oracle PMF.
        let probs = pmf_oracle(&spd(&[1.0]), 60);
        let brute: Vec<f64> = (1..=3).map(|k| brute_raw(&probs, k)).collect();
        let m = moments_from_cumulants(&[1.0, 1.0, 1.0]);
        for (a, b) in m.iter().zip([1.0, 2.0, 5.0]) {
            assert!(close(*a, b, 1e-14));
        }
        for (a, b) in m.iter().zip(&brute) {
            assert!(close(*a, *b, 1e-12));
        }

        let mu: f64 = 1.7;
        let m = moments_from_cumulants(&[mu, 0.0, 0.0, 0.0]);
        for (k, mk) in m.iter().enumerate() {
            assert!(close(*mk, mu.powi(k as i32 + 1), 1e-12));
        }

        let p = spd(&[0.3, 0.2, 0.1]);
        let m = raw_moments(&p, 2);
        let k1 = cumulant(&p, 1);
        assert!(close(m[1], cumulant(&p, 2) + k1 * k1, 1e-15));
    }

    #[test]
    fn cumulants_from_moments_examples() {
        let k = cumulants_from_moments(&[1.0, 2.0, 5.0, 15.0]);
        for x in k {
            assert!(close(x, 1.0, 1e-13));
        }
        let (m1, m2) = (0.4, 0.9);
        let k = cumulants_from_moments(&[m1, m2]);
        assert!(close(k[1], m2 - m1 * m1, 1e-16));

        // Central moments in, starred cumulants out: orders 2 and 3 coincide.
        let (m1, c2, c3) = (0.1010806364, 0.1074468102, 0.1216468798);
        let k = cumulants_from_moments(&[0.0, c2, c3]);
        assert_eq!(k[1], c2);
        assert_eq!(k[2], c3);
        let raw = moments_from_cumulants(&[m1, c2, c3]);
        let back = cumulants_from_moments(&raw);
        assert!(close(back[1], c2, 1e-15) && close(back[2], c3, 1e-15));
    }

    #[test]
    fn central_moments_examples() {
        let p = spd(&[0.5, 0.25]);
        let c = central_moments(&p, 4);
        let k = cumulants(&p, 4);
        assert_eq!(c[0], 0.0);
        assert!(close(c[1], k[1], 1e-15));
        assert!(close(c[2], k[2], 1e-15));
        assert!(close(c[3], k[3] + 3.0 * k[1] * k[1], 1e-13));

        let probs = pmf_oracle(&p, 120);
        let mean = brute_raw(&probs, 1);
        let c4: f64 = probs.iter().enumerate().map(|(j, q)| (j as f64 - mean).powi(4) * q).sum();
        assert!((c[3] - c4).abs() <= 1e-9 * c4);
    }

    #[test]
    fn sample_edge_cases_and_determinism() {
        let p = spd(&[0.5, 0.25]);
        assert!(sample(&p, 0, 1).is_empty());
        assert_eq!(sample(&p, 1000, 42), sample(&p, 1000, 42));
        assert_ne!(sample(&p, 1000, 42), sample(&p, 1000, 43));
    }

    #[test]
    fn sample_moments_within_clt_band() {
        let draws = 1_000_000;
        let n = draws as f64;
        let x = sample(&spd(&[1.0]), draws, 11);
        let mean = x.iter().sum::<u64>() as f64 / n;
        assert!((mean - 1.0).abs() < 4.0 / 1000.0, "{mean}");

        // theta = (0.5, 0.25): kappa = (1, 1.5, 2.5, 4.5).
        let p = spd(&[0.5, 0.25]);
        let c = central_moments(&p, 4);
        let x = sample(&p, draws, 12);
        let mean = x.iter().sum::<u64>() as f64 / n;
        let var = x.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        assert!((mean - 1.0).abs() < 4.0 * (1.5f64 / n).sqrt(), "{mean}");
        let var_se = ((c[3] - c[1] * c[1]) / n).sqrt();
        assert!((var - 1.5).abs() < 4.0 * var_se, "{var}");
    }

    #[test]
    fn pascal_rows() {
        let t = binomial_table(5);
        assert_eq!(t[5], vec![1.0, 5.0, 10.0, 10.0, 5.0, 1.0]);
    }

    #[test]
    fn baseline_pmfs() {
        assert_eq!(poisson_pmf(0.0, 2), vec![1.0, 0.0, 0.0]);
        let p = poisson_pmf(2.0, 3);
        assert!(close(p[3], (-2.0f64).exp() * 8.0 / 6.0, 1e-15));
        // NBD(1, p) is geometric.
        let g = nbd_pmf(1.0, 0.5, 4);
        for (k, v) in g.iter().enumerate() {
            assert!(close(*v, 0.5f64.powi(k as i32 + 1), 1e-14));
        }
    }

    #[test]
    fn divide_scales_rates() {
        let p = spd(&[0.5, 0.25]);
        assert_eq!(p.divide(1), p);
        assert_eq!(spd(&[1.0]).divide(2).rates(), &[0.5]);
    }

    fn rates_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 1..=6).prop_filter_map("positive last rate", |mut v| {
            let last = v.len() - 1;
            v[last] += 0.01;
            let total: f64 = v.iter().sum();
            if total > 5.0 {
                v.iter_mut().for_each(|t| *t *= 5.0 / total);
            }
            Some(v)
        })
    }

    proptest! {
        #[test]
        fn normalization_within_chernoff_bound(theta in rates_strategy(), n_max in 0usize..30) {
            let p = spd(&theta);
            let probs = pmf(&p, n_max).unwrap();
            let sum: f64 = probs.iter().sum();
            // Chernoff bound on the PGF: P(X > n) <= P(s) / s^(n+1) for any s >= 1.
            let a = (n_max + 1) as f64;
            let chernoff = (0..400)
                .map(|k| 1.0 + k as f64 * 0.05)
                .map(|s: f64| {
                    let log_pgf: f64 = theta
                        .iter()
                        .enumerate()
                        .map(|(i, t)| t * (s.powi(i as i32 + 1) - 1.0))
                        .sum();
                    (log_pgf - a * s.ln()).exp()
                })
                .fold(1.0, f64::min);
            prop_assert!(sum <= 1.0 + 1e-12);
            prop_assert!(sum >= 1.0 - chernoff - 1e-12, "sum {sum} bound {chernoff}");
        }

        #[test]
        fn convolution_closure(a in rates_strategy(), b in rates_strategy()) {
            let r = a.len().max(b.len());
            let sum: Vec<f64> = (0..r)
                .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
                .collect();
            let n = 25;
            let joint = pmf(&spd(&sum), n).unwrap();
            let conv = convolve(&pmf(&spd(&a), n).unwrap(), &pmf(&spd(&b), n).unwrap(), n);
            for (x, y) in joint.iter().zip(&conv) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
