//! Sweep bookkeeping: grid shape, pairing, determinism and table I/O.

use std::collections::{BTreeMap, HashSet};

use hurst_core::experiment::{
    determine_all_min_lengths, findings_json, metrics_csv_string, read_metrics_csv,
    run_sweep_with_threads,
};
use hurst_core::{run_sweep, Method, PrecisionTarget, SweepConfig};

fn small_config() -> SweepConfig {
    SweepConfig {
        h_values: vec![0.6, 0.9],
        log2_n_values: vec![6, 8, 10],
        replications: 6,
        ..SweepConfig::paper_defaults(2024)
    }
}

#[test]
fn grid_shape() {
    let config = SweepConfig {
        h_values: vec![0.7],
        log2_n_values: vec![8, 9],
        replications: 3,
        estimators: vec![Method::Whittle],
        ..SweepConfig::paper_defaults(1)
    };
    let out = run_sweep(&config).unwrap();
    assert_eq!(out.rows.len(), 2);
    assert_eq!(out.replications.len(), 6);

    let full = SweepConfig::paper_defaults(1);
    assert_eq!(full.series_count(), 11_000);
    assert_eq!(full.series_count() * full.estimators.len() / full.replications, 220);
}

#[test]
fn every_series_is_distinct_and_shared_by_all_estimators() {
    let out = run_sweep(&small_config()).unwrap();
    let seeds: HashSet<u64> = out.replications.iter().map(|r| r.seed).collect();
    let sums: HashSet<u64> = out.replications.iter().map(|r| r.checksum).collect();
    assert_eq!(seeds.len(), out.replications.len());
    assert_eq!(sums.len(), out.replications.len());
    // Each row's failure count agrees with the per-replication records, which
    // are shared by every estimator of the cell.
    let mut failures: BTreeMap<(Method, usize, usize), usize> = BTreeMap::new();
    for rec in &out.replications {
        for &m in &rec.failed {
            *failures.entry((m, rec.h_index, rec.n_index)).or_default() += 1;
        }
    }
    let config = small_config();
    for row in &out.rows {
        let hi = config.h_values.iter().position(|&h| h == row.h0).unwrap();
        let ni = config.log2_n_values.iter().position(|&i| i == row.log2_n).unwrap();
        assert_eq!(row.failures, failures.get(&(row.estimator, hi, ni)).copied().unwrap_or(0));
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let config = small_config();
    let reference = metrics_csv_string(&run_sweep_with_threads(&config, 1).unwrap().rows);
    for threads in [2, 8] {
        let out = run_sweep_with_threads(&config, threads).unwrap();
        assert_eq!(metrics_csv_string(&out.rows), reference, "threads={threads}");
    }
    assert_eq!(metrics_csv_string(&run_sweep(&config).unwrap().rows), reference);
}

#[test]
fn csv_round_trip_preserves_findings() {
    let out = run_sweep(&small_config()).unwrap();
    let csv = metrics_csv_string(&out.rows);
    assert!(csv.starts_with("estimator,h0,log2_n,replications,failures,mean,bias,sigma,mse,label\n"));
    let back = read_metrics_csv(csv.as_bytes()).unwrap();
    assert_eq!(back.len(), out.rows.len());
    for target in [PrecisionTarget::AcceptableOrBetter, PrecisionTarget::HighPrecision] {
        assert_eq!(
            findings_json(&determine_all_min_lengths(&back, target)),
            findings_json(&determine_all_min_lengths(&out.rows, target))
        );
    }
    // Periodogram cannot fit N = 64, so those cells carry failures.
    let short = out
        .rows
        .iter()
        .find(|r| r.estimator == Method::Periodogram && r.log2_n == 6)
        .unwrap();
    assert_eq!(short.failures, short.replications);
    assert!(short.metrics.is_none() && short.flagged());
}
