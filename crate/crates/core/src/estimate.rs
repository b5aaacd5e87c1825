//! Cumulant-matching estimation from count histograms.
//!
//! Cumulants of an r-th SPD are linear in the batch rates,
//! `kappa_n = sum_i theta_i i^n`, so matching the first `r` sample cumulants
//! is a Vandermonde solve. Poisson and negative binomial fits by the method
//! of moments serve as baselines.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::distribution::{
    cumulants_from_moments, nbd_pmf, pmf, poisson_pmf, BatchRates, GspdParams, SpdParams,
};
use crate::error::{Error, Result};

/// Relative residual above which a Vandermonde solve is rejected.
const CONDITIONING_TOL: f64 = 1e-6;

/// Observed frequencies `v_i` of count value `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountHistogram {
    bins: BTreeMap<u64, u64>,
    total: u64,
}

impl CountHistogram {
    /// Zero-frequency entries are kept out of the map.
    pub fn new(bins: BTreeMap<u64, u64>) -> Result<Self> {
        let bins: BTreeMap<u64, u64> = bins.into_iter().filter(|&(_, v)| v > 0).collect();
        let total = bins.values().sum();
        if total == 0 {
            return Err(Error::EmptyHistogram);
        }
        Ok(Self { bins, total })
    }

    /// `v_0, v_1, ...` for consecutive counts starting at zero.
    pub fn from_frequencies(freqs: &[u64]) -> Result<Self> {
        Self::new(freqs.iter().enumerate().map(|(i, &v)| (i as u64, v)).collect())
    }

    pub fn from_samples(samples: &[u64]) -> Result<Self> {
        let mut bins = BTreeMap::new();
        for &x in samples {
            *bins.entry(x).or_insert(0) += 1;
        }
        Self::new(bins)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn frequency(&self, count: u64) -> u64 {
        self.bins.get(&count).copied().unwrap_or(0)
    }

    pub fn max_count(&self) -> u64 {
        *self.bins.keys().next_back().expect("non-empty")
    }

    /// Number of count values with positive frequency.
    pub fn support_size(&self) -> usize {
        self.bins.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.bins.iter().map(|(&k, &v)| (k, v))
    }

    /// Frequencies `v_0..=v_max` as a dense vector.
    pub fn dense(&self, max: u64) -> Vec<u64> {
        (0..=max).map(|k| self.frequency(k)).collect()
    }
}

/// Plain (divide-by-n) sample moments.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMoments {
    /// `m_1..=m_K`.
    pub raw: Vec<f64>,
    /// `c_1..=c_K`, with `c_1 = 0`.
    pub central: Vec<f64>,
}

impl SampleMoments {
    pub fn mean(&self) -> f64 {
        self.raw[0]
    }

    /// Central moment of order `k >= 1`.
    pub fn central(&self, k: usize) -> f64 {
        self.central[k - 1]
    }

    pub fn raw(&self, k: usize) -> f64 {
        self.raw[k - 1]
    }
}

pub fn sample_moments(hist: &CountHistogram, order: usize) -> SampleMoments {
    assert!(order >= 1, "moment order starts at 1");
    let n = hist.total() as f64;
    let raw: Vec<f64> = (1..=order as i32)
        .map(|k| hist.iter().map(|(i, v)| v as f64 * (i as f64).powi(k)).sum::<f64>() / n)
        .collect();
    let mean = raw[0];
    let mut central: Vec<f64> = (1..=order as i32)
        .map(|k| hist.iter().map(|(i, v)| v as f64 * (i as f64 - mean).powi(k)).sum::<f64>() / n)
        .collect();
    central[0] = 0.0;
    SampleMoments { raw, central }
}

/// `kappa_1 = m_1`; higher orders from the central moments (cumulants of
/// order >= 2 are shift invariant), e.g. `kappa_4 = c_4 - 3 c_2^2`.
pub fn sample_cumulants(moments: &SampleMoments) -> Vec<f64> {
    let mut kappa = cumulants_from_moments(&moments.central);
    kappa[0] = moments.mean();
    kappa
}

/// Solves `sum_i i^n theta_i = kappa_n` (`n, i = 1..=r`) by Gaussian
/// elimination with partial pivoting.
pub fn vandermonde_solve(kappa: &[f64]) -> Result<Vec<f64>> {
    let r = kappa.len();
    if r == 0 {
        return Err(Error::InvalidParameter("at least one cumulant is required".into()));
    }
    let matrix: Vec<Vec<f64>> = (1..=r as i32)
        .map(|n| (1..=r).map(|i| (i as f64).powi(n)).collect())
        .collect();

    let lu = Elimination::factor(&matrix);
    let mut theta = lu.solve(kappa);
    // Iterative refinement against the unfactored system.
    for _ in 0..2 {
        let residual = residual(&matrix, &theta, kappa);
        let correction = lu.solve(&residual);
        theta.iter_mut().zip(&correction).for_each(|(t, c)| *t -= c);
    }

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let residual = residual(&matrix, &theta, kappa);
    let scale = norm(kappa);
    let relative = if scale > 0.0 { norm(&residual) / scale } else { norm(&residual) };
    if !(relative <= CONDITIONING_TOL) {
        return Err(Error::IllConditioned { order: r, residual: relative });
    }
    Ok(theta)
}

fn residual(matrix: &[Vec<f64>], x: &[f64], rhs: &[f64]) -> Vec<f64> {
    matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().zip(x).map(|(m, t)| m * t).sum::<f64>() - b)
        .collect()
}

/// Row-pivoted LU factors of a square matrix.
struct Elimination {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Elimination {
    fn factor(matrix: &[Vec<f64>]) -> Self {
        let r = matrix.len();
        let mut lu = matrix.to_vec();
        let mut perm: Vec<usize> = (0..r).collect();
        for col in 0..r {
            let pivot = (col..r)
                .max_by(|&x, &y| lu[x][col].abs().total_cmp(&lu[y][col].abs()))
                .expect("non-empty range");
            lu.swap(col, pivot);
            perm.swap(col, pivot);
            for row in col + 1..r {
                let f = lu[row][col] / lu[col][col];
                lu[row][col] = f;
                for k in col + 1..r {
                    lu[row][k] -= f * lu[col][k];
                }
            }
        }
        Self { lu, perm }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let r = self.lu.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for row in 0..r {
            for k in 0..row {
                y[row] -= self.lu[row][k] * y[k];
            }
        }
        for row in (0..r).rev() {
            for k in row + 1..r {
                y[row] -= self.lu[row][k] * y[k];
            }
            y[row] /= self.lu[row][row];
        }
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Poisson,
    NegativeBinomial,
    /// Stuttering Poisson with the given maximum batch size.
    Spd(usize),
}

impl Model {
    pub fn name(&self) -> String {
        match self {
            Model::Poisson => "poisson".into(),
            Model::NegativeBinomial => "nbd".into(),
            Model::Spd(r) => format!("spd:{r}"),
        }
    }

    /// Number of fitted parameters.
    pub fn parameter_count(&self) -> usize {
        match self {
            Model::Poisson => 1,
            Model::NegativeBinomial => 2,
            Model::Spd(r) => *r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Poisson { lambda: f64 },
    NegativeBinomial { r: f64, p: f64 },
    Spd(SpdParams),
    Gspd(GspdParams),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// Batch sizes (1-based) whose estimated rate came out negative.
    NegativeRates(Vec<usize>),
    /// Negative rates were set to zero and the rest renormalized.
    Clamped,
    /// Fewer distinct observed counts than fitted parameters.
    UnderDetermined { support: usize, order: usize },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::NegativeRates(sizes) => {
                write!(f, "negative rate estimate for batch sizes {sizes:?}")
            }
            Diagnostic::Clamped => write!(f, "negative rates clamped to zero and renormalized"),
            Diagnostic::UnderDetermined { support, order } => write!(
                f,
                "only {support} distinct counts observed for {order} parameters"
            ),
        }
    }
}

/// What to do with negative rate estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeRatePolicy {
    /// Keep the signed estimate as a GSPD and flag it.
    #[default]
    Keep,
    /// Clamp to zero and renormalize.
    Clamp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: Model,
    pub params: ModelParams,
    pub lambda_t: f64,
    /// Batch-size weights for SPD fits.
    pub alphas: Option<Vec<f64>>,
    pub diagnostics: Vec<Diagnostic>,
    pub sample_cumulants: Vec<f64>,
}

impl FitResult {
    /// Fitted PMF `P_0..=P_{n_max}`.
    pub fn pmf(&self, n_max: usize) -> Result<Vec<f64>> {
        match &self.params {
            ModelParams::Poisson { lambda } => Ok(poisson_pmf(*lambda, n_max)),
            ModelParams::NegativeBinomial { r, p } => Ok(nbd_pmf(*r, *p, n_max)),
            ModelParams::Spd(p) => pmf(p, n_max),
            ModelParams::Gspd(p) => pmf(p, n_max),
        }
    }

    /// SPD rates, when the model is (G)SPD.
    pub fn rates(&self) -> Option<&[f64]> {
        match &self.params {
            ModelParams::Spd(p) => Some(p.rates()),
            ModelParams::Gspd(p) => Some(p.rates()),
            _ => None,
        }
    }
}

/// Order-`r` SPD fit by matching sample cumulants `kappa_1..=kappa_r`.
pub fn fit_spd(hist: &CountHistogram, r: usize, policy: NegativeRatePolicy) -> Result<FitResult> {
    if r == 0 {
        return Err(Error::InvalidParameter("model order must be at least 1".into()));
    }
    let mut diagnostics = Vec::new();
    if hist.support_size() < r + 1 {
        diagnostics.push(Diagnostic::UnderDetermined {
            support: hist.support_size(),
            order: r,
        });
    }
    let kappa = sample_cumulants(&sample_moments(hist, r));
    let theta = vandermonde_solve(&kappa)?;

    let negative: Vec<usize> = theta
        .iter()
        .enumerate()
        .filter(|(_, &t)| t < 0.0)
        .map(|(i, _)| i + 1)
        .collect();
    // An exactly-zero top rate is still a valid signed law but not an r-th SPD.
    let top_vanishes = theta[r - 1] <= 0.0;

    let params = if negative.is_empty() && !top_vanishes {
        ModelParams::Spd(SpdParams::new(theta)?)
    } else {
        if !negative.is_empty() {
            diagnostics.push(Diagnostic::NegativeRates(negative));
        }
        match policy {
            NegativeRatePolicy::Keep => ModelParams::Gspd(GspdParams::new(theta)?),
            NegativeRatePolicy::Clamp => {
                let mut clamped: Vec<f64> = theta.iter().map(|t| t.max(0.0)).collect();
                let keep = clamped.iter().rposition(|&t| t > 0.0).ok_or_else(|| {
                    Error::InvalidRates("every estimated rate is non-positive".into())
                })?;
                clamped.truncate(keep + 1);
                if diagnostics.iter().any(|d| matches!(d, Diagnostic::NegativeRates(_))) {
                    diagnostics.push(Diagnostic::Clamped);
                }
                ModelParams::Spd(SpdParams::new(clamped)?)
            }
        }
    };

    let (lambda_t, alphas) = match &params {
        ModelParams::Spd(p) => (p.total_rate(), p.alphas()),
        ModelParams::Gspd(p) => (p.total_rate(), p.alphas()),
        _ => unreachable!(),
    };
    Ok(FitResult {
        model: Model::Spd(r),
        params,
        lambda_t,
        alphas: Some(alphas),
        diagnostics,
        sample_cumulants: kappa,
    })
}

/// `lambda = m_1`.
pub fn fit_poisson(hist: &CountHistogram) -> FitResult {
    let moments = sample_moments(hist, 1);
    let lambda = moments.mean();
    FitResult {
        model: Model::Poisson,
        params: ModelParams::Poisson { lambda },
        lambda_t: lambda,
        alphas: None,
        diagnostics: Vec::new(),
        sample_cumulants: vec![lambda],
    }
}

/// Method of moments: `p = m_1 / c_2`, `r = m_1^2 / (c_2 - m_1)`.
pub fn fit_nbd(hist: &CountHistogram) -> Result<FitResult> {
    let moments = sample_moments(hist, 2);
    let mean = moments.mean();
    let variance = moments.central(2);
    if !(variance > mean) {
        return Err(Error::NotOverdispersed { mean, variance });
    }
    let p = mean / variance;
    let r = mean * mean / (variance - mean);
    Ok(FitResult {
        model: Model::NegativeBinomial,
        params: ModelParams::NegativeBinomial { r, p },
        // Rate of the equivalent SPD: -r ln p.
        lambda_t: -r * p.ln(),
        alphas: None,
        diagnostics: Vec::new(),
        sample_cumulants: sample_cumulants(&moments),
    })
}

/// Multinomial resample of `hist` with the same total, by sequential binomial splitting.
pub fn resample(hist: &CountHistogram, rng: &mut ChaCha8Rng) -> CountHistogram {
    let mut remaining_n = hist.total();
    let mut remaining_mass = hist.total();
    let mut bins = BTreeMap::new();
    for (count, freq) in hist.iter() {
        if remaining_n == 0 {
            break;
        }
        let p = (freq as f64 / remaining_mass as f64).min(1.0);
        let draw = Binomial::new(remaining_n, p).expect("p in [0, 1]").sample(rng);
        bins.insert(count, draw);
        remaining_n -= draw;
        remaining_mass -= freq;
    }
    CountHistogram::new(bins).expect("total preserved")
}

/// Bootstrap standard errors of the order-`r` SPD rate estimates.
pub fn bootstrap_spd_standard_errors(
    hist: &CountHistogram,
    r: usize,
    resamples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if resamples < 2 {
        return Err(Error::InvalidParameter("at least two resamples are required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let kappa = sample_cumulants(&sample_moments(&resample(hist, &mut rng), r));
        draws.push(vandermonde_solve(&kappa)?);
    }
    let m = resamples as f64;
    Ok((0..r)
        .map(|i| {
            let mean = draws.iter().map(|d| d[i]).sum::<f64>() / m;
            (draws.iter().map(|d| (d[i] - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
        })
        .collect())
}
