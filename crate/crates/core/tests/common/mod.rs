#![allow(dead_code)]

use hurst_core::{EstimatorConfig, FgnGenerator, FgnModel, Method, TimeSeries};
use rayon::prelude::*;

pub fn fgn(h: f64, n: usize, seed: u64) -> TimeSeries {
    FgnGenerator::new(FgnModel::standard(h).unwrap(), n).unwrap().generate(seed)
}

/// Estimates over seeds `base..base+count`, failures dropped.
pub fn monte_carlo(h: f64, n: usize, method: Method, base: u64, count: u64) -> Vec<f64> {
    let gen = FgnGenerator::new(FgnModel::standard(h).unwrap(), n).unwrap();
    let config = EstimatorConfig::default();
    (base..base + count)
        .into_par_iter()
        .filter_map(|s| config.estimate(&gen.generate(s), method).ok().map(|e| e.h_hat))
        .collect()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}
