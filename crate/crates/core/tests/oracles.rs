//! Library routines checked against brute-force reference computations.

mod common;

use std::f64::consts::PI;

use hurst_core::estimators::periodogram;
use hurst_core::regression::{ordinary_linear_fit, weighted_linear_fit};
use hurst_core::{
    aggregate_blocks, circulant_eigenvalues, empirical_autocovariance, estimate,
    fgn_autocovariance, FgnModel, Method, TimeSeries,
};
use proptest::prelude::*;

fn brute_autocovariance(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if j == i + lag {
                acc += (x[i] - mean) * (x[j] - mean);
            }
        }
    }
    acc / n as f64
}

fn brute_eigenvalues(model: &FgnModel, n: usize) -> Vec<f64> {
    let l = (2 * n).next_power_of_two();
    let half = l / 2;
    let row: Vec<f64> = (0..l)
        .map(|j| fgn_autocovariance(model, if j <= half { j } else { l - j }))
        .collect();
    (0..l)
        .map(|k| {
            row.iter()
                .enumerate()
                .map(|(j, r)| r * (2.0 * PI * (j * k) as f64 / l as f64).cos())
                .sum()
        })
        .collect()
}

#[test]
fn autocovariance_of_a_64_sample_series() {
    let s = common::fgn(0.7, 64, 11);
    let curve = empirical_autocovariance(&s, 63).unwrap();
    for lag in 0..64 {
        let expected = brute_autocovariance(s.values(), lag);
        assert!((curve.values[lag] - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }
}

#[test]
fn eigenvalues_match_dft_sum_for_small_embeddings() {
    for h in [0.5, 0.6, 0.7, 0.8, 0.9] {
        let model = FgnModel::standard(h).unwrap();
        for n in [2usize, 3, 5, 8, 17, 33, 64] {
            let fast = circulant_eigenvalues(&model, n).unwrap();
            let slow = brute_eigenvalues(&model, n);
            assert_eq!(fast.len(), slow.len(), "n={n}");
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9, "h={h} n={n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn parseval_on_seeded_fgn() {
    for (h, n) in [(0.8, 1024usize), (0.6, 1023)] {
        let s = common::fgn(h, n, 4);
        let p = periodogram(&s).unwrap();
        let var = s.biased_variance();
        assert!(((p.parseval_variance() - var) / var).abs() < 1e-9, "n={n}");
        assert_eq!(p.ordinates.len(), (n - 1) / 2);
    }
}

#[test]
fn estimators_are_scale_and_shift_invariant() {
    let s = common::fgn(0.75, 4096, 21);
    for method in Method::ALL {
        let base = estimate(&s, method).unwrap().h_hat;
        for c in [0.1, 10.0] {
            let scaled = TimeSeries::new(s.values().iter().map(|v| v * c).collect()).unwrap();
            let shifted = TimeSeries::new(s.values().iter().map(|v| v + c).collect()).unwrap();
            let hs = estimate(&scaled, method).unwrap().h_hat;
            let hm = estimate(&shifted, method).unwrap().h_hat;
            assert!((hs - base).abs() < 1e-9, "{method} scale {c}: {hs} vs {base}");
            assert!((hm - base).abs() < 1e-9, "{method} shift {c}: {hm} vs {base}");
        }
    }
}

/// Solves the 2×2 weighted normal equations by Cramer's rule.
fn normal_equations(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64) {
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        s += wi;
        sx += wi * xi;
        sy += wi * yi;
        sxx += wi * xi * xi;
        sxy += wi * xi * yi;
    }
    let det = s * sxx - sx * sx;
    ((s * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn empirical_autocovariance_matches_double_loop(values in prop::collection::vec(-100.0f64..100.0, 2..=256)) {
        let s = TimeSeries::new(values).unwrap();
        let max_lag = (s.len() - 1).min(40);
        let curve = empirical_autocovariance(&s, max_lag).unwrap();
        for lag in 0..=max_lag {
            let expected = brute_autocovariance(s.values(), lag);
            prop_assert!((curve.values[lag] - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn aggregation_composes(values in prop::collection::vec(-1e3f64..1e3, 1..200), m1 in 1usize..6, m2 in 1usize..6) {
        let s = TimeSeries::new(values).unwrap();
        prop_assume!(m1 * m2 <= s.len());
        let twice = aggregate_blocks(&aggregate_blocks(&s, m1).unwrap(), m2).unwrap();
        let once = aggregate_blocks(&s, m1 * m2).unwrap();
        prop_assert_eq!(twice.len(), once.len());
        for (a, b) in twice.values().iter().zip(once.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn weighted_fit_with_equal_weights_is_ols(
        points in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..40),
        w in 0.1f64..10.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        let spread = x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min);
        prop_assume!(spread > 1.0);
        let weights = vec![w; x.len()];
        let fit = weighted_linear_fit(&x, &y, &weights).unwrap();
        let ols = ordinary_linear_fit(&x, &y).unwrap();
        let (slope, intercept) = normal_equations(&x, &y, &weights);
        prop_assert!((fit.slope - slope).abs() <= 1e-12 * slope.abs().max(1.0));
        prop_assert!((fit.intercept - intercept).abs() <= 1e-12 * intercept.abs().max(1.0));
        prop_assert!((ols.slope - fit.slope).abs() <= 1e-12 * slope.abs().max(1.0));
    }
}
