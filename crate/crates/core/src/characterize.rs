//! Recognizing discrete laws as stuttering Poisson laws.
//!
//! Taking the logarithm of a PGF `P(s) = sum p_i s^i` gives
//! `ln P(s) = b_0 + b_1 s + b_2 s^2 + ...` with `b_0 = ln p_0`. The law is an
//! SPD with batch rates `b_i` exactly when every `b_i` (`i >= 1`) is
//! nonnegative and `sum b_i` converges (to `-ln p_0`). When `p_0 > 0.5` the
//! series converges absolutely whatever the signs, and the law has the signed
//! (GSPD) representation `theta_i = b_i`.

use crate::distribution::{BatchRates, GspdParams, SpdParams};
use crate::error::{Error, Result};
use crate::series::PowerSeries;

/// Default nonnegativity tolerance for [`classify`].
pub const DEFAULT_NONNEG_TOL: f64 = 1e-10;

/// Relative tolerance on `|sum_{i<=n} b_i + ln p_0|` for the partial sums to count as settled.
const SETTLED_TOL: f64 = 1e-8;

const MASS_TOL: f64 = 1e-9;

/// A probability mass function `p_0..=p_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    truncated: bool,
}

impl Pmf {
    /// A complete law: entries nonnegative, total mass within `1e-9` of one.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mass = Self::validate(&probs)?;
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidPmf(format!("total mass {mass} is not 1")));
        }
        Ok(Self { probs, truncated: false })
    }

    /// A prefix of a law with unbounded support: total mass may fall short of one.
    pub fn truncated(probs: Vec<f64>) -> Result<Self> {
        let mass = Self::validate(&probs)?;
        if mass > 1.0 + MASS_TOL || mass <= 0.0 {
            return Err(Error::InvalidPmf(format!("total mass {mass} outside (0, 1]")));
        }
        Ok(Self { probs, truncated: true })
    }

    fn validate(probs: &[f64]) -> Result<f64> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("no probabilities given".into()));
        }
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, &p)| p < 0.0) {
            return Err(Error::InvalidPmf(format!("p_{i} = {p} is negative")));
        }
        Ok(probs.iter().sum())
    }

    /// Point mass at `k`.
    pub fn point_mass(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self { probs, truncated: false }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn p0(&self) -> f64 {
        self.probs[0]
    }

    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn as_series(&self) -> PowerSeries {
        PowerSeries::new(self.probs.clone()).expect("validated finite")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// Nonnegative, summable log-PGF coefficients.
    Spd,
    /// Signed but absolutely summable coefficients.
    Gspd,
    /// Neither property could be established from the available coefficients.
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: LawKind,
    /// Extracted rates `b_1..=b_n`.
    pub rates: Vec<f64>,
    /// Bound on `|sum rates + ln p_0|`: the neglected log-series tail plus the
    /// mass missing from a truncated input.
    pub residual: f64,
}

impl Classification {
    pub fn params(&self) -> Result<GspdParams> {
        GspdParams::new(trim_trailing_zeros(&self.rates))
    }
}

fn trim_trailing_zeros(rates: &[f64]) -> Vec<f64> {
    let keep = rates.iter().rposition(|&t| t != 0.0).map_or(0, |i| i + 1);
    rates[..keep].to_vec()
}

/// `b_0..=b_n` of `ln P(s)`.
pub fn log_pgf_coefficients(pmf: &Pmf, n: usize) -> Result<PowerSeries> {
    if pmf.p0() <= 0.0 {
        return Err(Error::ZeroMassAtOrigin(pmf.p0()));
    }
    pmf.as_series().ln(n)
}

/// Rigorous bound on `sum_{i>n} |b_i|` when `p_0 > 0.5`.
///
/// With `Q(s) = sum_{i>=1} (p_i / p_0) s^i` and `rho = Q(1) < 1`, the log
/// coefficients are dominated termwise by those of `-ln(1 - |Q|(s))`, whose
/// tail beyond `n` is `-ln(1 - rho)` minus its first `n` coefficients.
/// The result includes an allowance for rounding in the subtraction.
pub fn log_series_tail_bound(pmf: &Pmf, n: usize) -> Result<f64> {
    let p0 = pmf.p0();
    if p0 <= 0.5 {
        return Err(Error::OriginMassTooSmall(p0));
    }
    let mut dominant = vec![1.0];
    dominant.extend(pmf.probs()[1..].iter().map(|p| -p / p0));
    let rho = -dominant[1..].iter().sum::<f64>();
    let total = -(1.0 - rho).ln();
    let d = PowerSeries::new(dominant)?.ln(n)?;
    let head: f64 = -d.coeffs()[1..].iter().sum::<f64>();
    let rounding = (n as f64 + 1.0) * f64::EPSILON * 4.0 * (1.0 + total);
    Ok((total - head).max(0.0) + rounding)
}

/// Decides whether `pmf` is SPD, GSPD, or undecided from its first `n` log-PGF coefficients.
pub fn classify(pmf: &Pmf, n: usize, tol: f64) -> Result<Classification> {
    let b = log_pgf_coefficients(pmf, n)?;
    let rates = b.coeffs()[1..].to_vec();
    let target = -pmf.p0().ln();
    let partial: f64 = rates.iter().sum();
    let discrepancy = (partial - target).abs();
    let settled = discrepancy <= SETTLED_TOL * target.abs().max(1.0);
    let nonnegative = rates.iter().all(|&r| r >= -tol);
    let missing_mass = pmf.mass().ln().abs();

    let absolutely_summable = || {
        // Empirical check: the last quarter of coefficients carries negligible mass.
        let from = rates.len() - rates.len() / 4;
        let late: f64 = rates[from..].iter().map(|r| r.abs()).sum();
        let all: f64 = rates.iter().map(|r| r.abs()).sum();
        rates.len() >= 4 && late <= SETTLED_TOL * all.max(1.0)
    };

    let kind = if nonnegative && settled {
        LawKind::Spd
    } else if pmf.p0() > 0.5 || absolutely_summable() {
        LawKind::Gspd
    } else {
        LawKind::Undecided
    };

    let residual = match log_series_tail_bound(pmf, n) {
        Ok(bound) => bound + missing_mass,
        Err(_) => discrepancy + missing_mass,
    };
    Ok(Classification { kind, rates, residual })
}

/// Signed batch rates `theta_i = b_i`, `1 <= i <= n`, of a law with `p_0 > 0.5`.
pub fn gspd_from_pmf(pmf: &Pmf, n: usize) -> Result<GspdParams> {
    let p0 = pmf.p0();
    if p0 <= 0.5 {
        return Err(Error::OriginMassTooSmall(p0));
    }
    if pmf.probs().iter().skip(1).all(|&p| p == 0.0) {
        return Err(Error::ZeroRate);
    }
    let b = log_pgf_coefficients(pmf, n)?;
    GspdParams::new(trim_trailing_zeros(&b.coeffs()[1..]))
}

/// Negative binomial `NB(r, p)` as an SPD: `theta_i = r (1 - p)^i / i` for `i <= max_batch`.
pub fn nbd_as_spd(r: f64, p: f64, max_batch: usize) -> Result<SpdParams> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("r = {r} must be positive")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1)")));
    }
    if max_batch == 0 {
        return Err(Error::InvalidParameter("truncation order must be at least 1".into()));
    }
    let q = 1.0 - p;
    let theta = (1..=max_batch)
        .map(|i| r * q.powi(i as i32) / i as f64)
        .collect();
    SpdParams::new(theta)
}

/// Law of `X_1 + ... + X_N` with `N ~ outer` and `X_i ~ inner` i.i.d.
///
/// Expands `sum_j theta_j G(s)^j` to order `n` and drops its constant term
/// `sum_j theta_j b_0^j`; the remaining coefficients are the new batch rates.
pub fn compound_spd(outer: &SpdParams, inner: &Pmf, n: usize) -> Result<SpdParams> {
    if inner.p0() >= 1.0 {
        return Err(Error::ZeroRate);
    }
    let g = inner.as_series().truncate(n);
    let mut acc = PowerSeries::zero(n);
    let mut power = PowerSeries::unit(n);
    for &theta in outer.rates() {
        power = power.mul(&g, n);
        acc = acc.add(&power.scale(theta), n);
    }
    SpdParams::new(trim_trailing_zeros(&acc.coeffs()[1..]))
}

/// `sum_j theta_j (1 - p_0^j)`: total batch rate of [`compound_spd`] before truncation.
pub fn compound_total_rate(outer: &SpdParams, inner: &Pmf) -> f64 {
    outer
        .rates()
        .iter()
        .enumerate()
        .map(|(j, t)| t * (1.0 - inner.p0().powi(j as i32 + 1)))
        .sum()
}
