//! Expected counts, the Pearson statistic and chi-squared tail probabilities.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Significance levels reported in a [`GofReport`].
pub const SIGNIFICANCE_LEVELS: [f64; 4] = [0.5, 0.1, 0.05, 0.01];

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 10_000;

/// `e_i = n P_i`; with `tail_bin`, one more entry `n (1 - sum P_i)` for everything beyond.
pub fn expected_counts(pmf_prefix: &[f64], n: u64, tail_bin: bool) -> Vec<f64> {
    let n = n as f64;
    let mut out: Vec<f64> = pmf_prefix.iter().map(|p| n * p).collect();
    if tail_bin {
        let mass: f64 = pmf_prefix.iter().sum();
        out.push((n * (1.0 - mass)).max(0.0));
    }
    out
}

/// `eta = sum v_i^2 / e_i - sum v_i`.
///
/// Equal to `sum (v_i - e_i)^2 / e_i` whenever the two totals agree.
pub fn pearson_eta(observed: &[f64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(Error::LengthMismatch(observed.len(), expected.len()));
    }
    if let Some((bin, &e)) = expected.iter().enumerate().find(|(_, &e)| !(e > 0.0)) {
        return Err(Error::DegenerateExpected { bin, expected: e });
    }
    let ratio: f64 = observed.iter().zip(expected).map(|(v, e)| v * v / e).sum();
    Ok(ratio - observed.iter().sum::<f64>())
}

/// Rounds each expected count to `decimals` places, as when a statistic is
/// recomputed from a published table.
pub fn round_counts(expected: &[f64], decimals: u32) -> Vec<f64> {
    let scale = 10f64.powi(decimals as i32);
    expected.iter().map(|e| (e * scale).round() / scale).collect()
}

/// Folds bins `from..` of both series into a single last bin.
pub fn merge_tail(observed: &[f64], expected: &[f64], from: usize) -> (Vec<f64>, Vec<f64>) {
    let fold = |v: &[f64]| {
        if from >= v.len() {
            return v.to_vec();
        }
        let mut head = v[..from].to_vec();
        head.push(v[from..].iter().sum());
        head
    };
    (fold(observed), fold(expected))
}

/// Regularized lower incomplete gamma `P(a, x)` by its power series (`x < a + 1`).
fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..GAMMA_MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma `Q(a, x)` by Lentz's continued fraction (`x >= a + 1`).
fn upper_gamma_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// `Q(a, x) = 1 - P(a, x)`.
pub fn regularized_upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - lower_gamma_series(a, x)
    } else {
        upper_gamma_fraction(a, x)
    }
}

/// `P(chi^2_df > x)`.
pub fn chi2_upper_tail(x: f64, df: u32) -> f64 {
    assert!(df >= 1, "degrees of freedom start at 1");
    regularized_upper_gamma(df as f64 / 2.0, x / 2.0).clamp(0.0, 1.0)
}

/// Upper-`p` quantile: the `x` with `chi2_upper_tail(x, df) = p`, by bisection.
pub fn chi2_critical_value(p: f64, df: u32) -> f64 {
    assert!(p > 0.0 && p < 1.0, "tail probability must lie in (0, 1)");
    let mut lo = 0.0;
    let mut hi = df as f64 + 10.0;
    while chi2_upper_tail(hi, df) > p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi2_upper_tail(mid, df) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofBin {
    pub label: String,
    pub observed: f64,
    pub expected: f64,
    /// Whether the bin enters the statistic.
    pub counted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub bins: Vec<GofBin>,
    pub eta: f64,
    /// Counted bins minus one.
    pub df: u32,
    /// `df` minus the number of fitted parameters (at least 1).
    pub adjusted_df: u32,
    pub p_value: f64,
    pub adjusted_p_value: f64,
    /// `(significance level, critical value at df)`.
    pub critical_values: Vec<(f64, f64)>,
}

/// Options for [`gof_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GofOptions {
    /// Count the tail bin in the statistic.
    pub include_tail: bool,
    /// Round expected counts to this many decimals before computing `eta`.
    pub expected_decimals: Option<u32>,
    /// Number of fitted parameters, for the adjusted degrees of freedom.
    pub fitted_parameters: usize,
}

/// Builds a report over explicit bins `first..=last` plus a tail bin collecting
/// everything outside the range.
///
/// `observed[i]` is the frequency of count `first + i`; `outside` is the
/// observed frequency outside the range. `pmf` must cover `0..=last`.
pub fn gof_report(
    observed: &[f64],
    outside: f64,
    pmf: &[f64],
    first: usize,
    n: u64,
    options: GofOptions,
) -> Result<GofReport> {
    let last = first + observed.len() - 1;
    if pmf.len() <= last {
        return Err(Error::LengthMismatch(observed.len(), pmf.len().saturating_sub(first)));
    }
    let mut expected = expected_counts(&pmf[first..=last], n, false);
    let inside: f64 = expected.iter().sum();
    let tail_expected = (n as f64 - inside).max(0.0);
    expected.push(tail_expected);
    if let Some(d) = options.expected_decimals {
        expected = round_counts(&expected, d);
    }

    let mut bins: Vec<GofBin> = observed
        .iter()
        .zip(&expected)
        .enumerate()
        .map(|(i, (&o, &e))| GofBin {
            label: (first + i).to_string(),
            observed: o,
            expected: e,
            counted: true,
        })
        .collect();
    let tail_label = if first == 0 {
        format!(">{last}")
    } else {
        format!("<{first} or >{last}")
    };
    bins.push(GofBin {
        label: tail_label,
        observed: outside,
        expected: *expected.last().unwrap(),
        counted: options.include_tail,
    });

    let (obs, exp): (Vec<f64>, Vec<f64>) = bins
        .iter()
        .filter(|b| b.counted)
        .map(|b| (b.observed, b.expected))
        .unzip();
    let eta = pearson_eta(&obs, &exp)?;
    let df = (obs.len().saturating_sub(1)).max(1) as u32;
    let adjusted_df = (obs.len().saturating_sub(1 + options.fitted_parameters)).max(1) as u32;
    Ok(GofReport {
        bins,
        eta,
        df,
        adjusted_df,
        p_value: chi2_upper_tail(eta.max(0.0), df),
        adjusted_p_value: chi2_upper_tail(eta.max(0.0), adjusted_df),
        critical_values: SIGNIFICANCE_LEVELS
            .iter()
            .map(|&p| (p, chi2_critical_value(p, df)))
            .collect(),
    })
}
