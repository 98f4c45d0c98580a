//! Capture ingestion, sliding scans and phase profiles end to end.

mod common;

use std::fmt::Write as _;
use std::fs;

use common::{mean, sample_sd};
use hurst_core::trace::{ingest_capture_csv_with, BinMode};
use hurst_core::{
    convergence_profile, estimate, ingest_capture_csv, run_sweep, sliding_scan, HurstError, Method,
    ScanPlan, SweepConfig, TimeSeries,
};
use rayon::prelude::*;

fn write_capture(rows: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("capture.csv");
    fs::write(&path, rows).unwrap();
    (dir, path)
}

#[test]
fn ingest_small_captures() {
    let (_d, p) = write_capture("timestamp,frame_bytes\n0.001,100\n0.002,200\n0.003,50\n");
    let s = ingest_capture_csv(&p, 0.01).unwrap();
    assert_eq!(s.values(), &[350.0]);

    let (_d, p) = write_capture("0.0,100\n0.025,60\n");
    let s = ingest_capture_csv(&p, 0.01).unwrap();
    assert_eq!(s.values(), &[100.0, 0.0, 60.0]);
    assert_eq!((s.origin(), s.step()), (Some(0.0), Some(0.01)));
    let s = ingest_capture_csv_with(&p, 0.01, BinMode::Packets).unwrap();
    assert_eq!(s.values(), &[1.0, 0.0, 1.0]);

    let (_d, p) = write_capture("");
    assert!(matches!(ingest_capture_csv(&p, 0.01), Err(HurstError::EmptyInput(_))));
    let (_d, p) = write_capture("0.0,100\n0.1,oops\n");
    assert!(matches!(ingest_capture_csv(&p, 0.01), Err(HurstError::Ingest { line: 2, .. })));
    assert!(ingest_capture_csv(std::path::Path::new("/nonexistent/capture.csv"), 0.01)
        .unwrap_err()
        .is_io());
}

#[test]
fn ingest_conserves_bytes_over_100k_rows() {
    let mut text = String::from("timestamp,frame_bytes\n");
    let mut total: u64 = 0;
    let mut t = 1_700_000_000.0f64;
    for i in 0..100_000u64 {
        let bytes = 40 + (i * 7919 + 13) % 1461;
        t += 1e-4 * ((i * 31) % 17) as f64;
        total += bytes;
        writeln!(text, "{t:.6},{bytes}").unwrap();
    }
    let (_d, p) = write_capture(&text);
    let s = ingest_capture_csv(&p, 0.01).unwrap();
    assert_eq!(s.values().iter().sum::<f64>(), total as f64);
    let packets = ingest_capture_csv_with(&p, 0.01, BinMode::Packets).unwrap();
    assert_eq!(packets.values().iter().sum::<f64>(), 100_000.0);
    assert_eq!(s.len(), packets.len());
}

#[test]
fn scan_is_deterministic() {
    let s = common::fgn(0.7, 5000, 8);
    let plan = ScanPlan::new(512, 100, Method::AbryVeitch).unwrap();
    let a = sliding_scan(&s, &plan).unwrap();
    assert_eq!(a, sliding_scan(&s, &plan).unwrap());
    assert_eq!(a.len(), (5000 - 512) / 100 + 1);
}

#[test]
fn scan_separates_a_regime_change() {
    let half = 1usize << 12;
    let plan = ScanPlan::new(256, 128, Method::Whittle).unwrap();
    let gaps: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut v = common::fgn(0.6, half, 2 * seed).into_values();
            v.extend(common::fgn(0.9, half, 2 * seed + 1).values());
            let points = sliding_scan(&TimeSeries::new(v).unwrap(), &plan).unwrap();
            let side = |second: bool| {
                let hs: Vec<f64> = points
                    .iter()
                    .filter(|p| if second { p.t_index >= half } else { p.t_index + 256 <= half })
                    .filter_map(|p| p.h_e)
                    .collect();
                mean(&hs)
            };
            side(true) - side(false)
        })
        .collect();
    let m = mean(&gaps);
    assert!(m >= 0.15, "mean separation {m}");
}

#[test]
fn scan_of_stationary_noise_varies_like_the_estimator() {
    let mut config = SweepConfig::paper_defaults(99);
    config.h_values = vec![0.8];
    config.log2_n_values = vec![10];
    config.estimators = vec![Method::Whittle];
    let sigma = run_sweep(&config).unwrap().rows[0].metrics.unwrap().sigma;

    let s = common::fgn(0.8, 1 << 16, 123);
    let points = sliding_scan(&s, &ScanPlan::new(1 << 10, 1 << 9, Method::Whittle).unwrap()).unwrap();
    let hs: Vec<f64> = points.iter().filter_map(|p| p.h_e).collect();
    assert_eq!(hs.len(), points.len());
    let spread = sample_sd(&hs);
    assert!(spread <= 2.0 * sigma, "window spread {spread}, sweep sigma {sigma}");
}

#[test]
fn profile_starts_at_the_direct_estimate() {
    let s = common::fgn(0.8, 1 << 14, 17);
    let rows = convergence_profile(&s, Method::Whittle, &[1, 2, 4, 8]).unwrap();
    assert_eq!(rows[0].mean_h, Some(estimate(&s, Method::Whittle).unwrap().h_hat));
    assert!(rows.iter().all(|r| r.failed == 0 && r.phases == r.m));
}

#[test]
fn profile_of_white_noise_is_flat() {
    // Decimated white noise is white noise, so every factor sees H = 1/2.
    let means: Vec<Vec<f64>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            convergence_profile(&common::fgn(0.5, 1 << 14, seed), Method::Whittle, &[1, 2, 4, 8])
                .unwrap()
                .iter()
                .map(|r| r.mean_h.unwrap())
                .collect()
        })
        .collect();
    let per_m: Vec<f64> = (0..4).map(|j| mean(&means.iter().map(|r| r[j]).collect::<Vec<_>>())).collect();
    let (lo, hi) = per_m.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi - lo <= 0.05, "{per_m:?}");
}

#[test]
fn profile_of_persistent_noise_decreases_with_decimation() {
    // Phase subsampling keeps the long-range exponent but thins the
    // short-lag correlation, which a full-band fGn fit reads as lower H.
    let s = common::fgn(0.8, 1 << 16, 4);
    let rows = convergence_profile(&s, Method::Whittle, &[1, 2, 4, 8]).unwrap();
    let means: Vec<f64> = rows.iter().map(|r| r.mean_h.unwrap()).collect();
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
}
