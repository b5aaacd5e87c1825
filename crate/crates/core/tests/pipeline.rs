use spd_core::characterize::{classify, nbd_as_spd, LawKind, Pmf, DEFAULT_NONNEG_TOL};
use spd_core::distribution::{nbd_pmf, pmf, sample, BatchRates, SpdParams};
use spd_core::estimate::{fit_spd, CountHistogram, Model, NegativeRatePolicy};
use spd_core::gof::{gof_report, GofOptions};

#[test]
fn simulate_fit_and_test() {
    let truth = SpdParams::new(vec![0.4, 0.1, 0.05]).unwrap();
    let hist = CountHistogram::from_samples(&sample(&truth, 200_000, 5)).unwrap();
    let fit = fit_spd(&hist, 3, NegativeRatePolicy::Clamp).unwrap();
    for (a, b) in fit.rates().unwrap().iter().zip(truth.rates()) {
        assert!((a - b).abs() < 0.02, "{a} vs {b}");
    }

    let last: usize = 8;
    let observed: Vec<f64> = (0..=last as u64).map(|k| hist.frequency(k) as f64).collect();
    let outside = hist.total() as f64 - observed.iter().sum::<f64>();
    let options = GofOptions { include_tail: true, expected_decimals: None, fitted_parameters: 0 };
    let truth_report =
        gof_report(&observed, outside, &pmf(&truth, last).unwrap(), 0, hist.total(), options).unwrap();
    // Samples from the law itself should not be rejected at the 0.1% level.
    assert!(truth_report.p_value > 1e-3, "p = {}", truth_report.p_value);

    // Cumulant matching is not a minimum chi-square estimator, so only a loose check here.
    let options = GofOptions { fitted_parameters: Model::Spd(3).parameter_count(), ..options };
    let fit_report = gof_report(&observed, outside, &fit.pmf(last).unwrap(), 0, hist.total(), options).unwrap();
    assert!(fit_report.eta.is_finite() && fit_report.eta < 10.0 * truth_report.eta.max(1.0));
}

#[test]
fn negative_binomial_round_trip() {
    let spd = nbd_as_spd(2.0, 0.6, 80).unwrap();
    let probs = pmf(&spd, 60).unwrap();
    let exact = nbd_pmf(2.0, 0.6, 60);
    assert!(probs.iter().zip(&exact).all(|(a, b)| (a - b).abs() < 1e-12));
    let c = classify(&Pmf::truncated(probs).unwrap(), 40, DEFAULT_NONNEG_TOL).unwrap();
    assert_eq!(c.kind, LawKind::Spd);
}
