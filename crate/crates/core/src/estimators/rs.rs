//! Rescaled-range (R/S) analysis with a pox-plot regression.

use super::{HurstEstimate, Method};
use crate::error::{HurstError, Result};
use crate::model::TimeSeries;
use crate::regression::ordinary_linear_fit;

pub const DEFAULT_MIN_BLOCK: usize = 8;
const SIZES_PER_DECADE: f64 = 10.0;
const MIN_SIZES: usize = 4;

/// Block sizes `round(min_block · 10^{k/10})` up to `n/2`, deduplicated.
pub fn rs_block_sizes(n: usize, min_block: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = Vec::new();
    for k in 0.. {
        let d = (min_block as f64 * 10f64.powf(k as f64 / SIZES_PER_DECADE)).round() as usize;
        if d > n / 2 {
            break;
        }
        if sizes.last() != Some(&d) {
            sizes.push(d);
        }
    }
    sizes
}

/// R/S of one block, or `None` when its spread is zero up to rounding.
fn rescaled_range(block: &[f64]) -> Option<f64> {
    let d = block.len() as f64;
    let mean = block.iter().sum::<f64>() / d;
    let (mut cum, mut lo, mut hi, mut ss) = (0.0f64, 0.0f64, 0.0f64, 0.0);
    for &x in block {
        let dev = x - mean;
        cum += dev;
        lo = lo.min(cum);
        hi = hi.max(cum);
        ss += dev * dev;
    }
    let s = (ss / d).sqrt();
    let scale = block.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(s > 1e-12 * scale) {
        return None;
    }
    Some((hi - lo) / s)
}

/// Mean R/S over non-overlapping blocks of each size; `h` is the OLS slope
/// of `log(R/S)` on `log d`.
pub fn estimate_rs(series: &TimeSeries, min_block: usize) -> Result<HurstEstimate> {
    if min_block < DEFAULT_MIN_BLOCK {
        return Err(HurstError::InvalidParameter(format!(
            "minimum block size must be at least {DEFAULT_MIN_BLOCK}, got {min_block}"
        )));
    }
    let n = series.len();
    if n < 2 * min_block {
        return Err(HurstError::TooShort {
            required: 2 * min_block,
            actual: n,
        });
    }
    let values = series.values();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut skipped_blocks = 0usize;
    for d in rs_block_sizes(n, min_block) {
        let (mut total, mut used) = (0.0, 0usize);
        for block in values.chunks_exact(d) {
            match rescaled_range(block) {
                Some(rs) => {
                    total += rs;
                    used += 1;
                }
                None => skipped_blocks += 1,
            }
        }
        if used > 0 && total > 0.0 {
            xs.push((d as f64).ln());
            ys.push((total / used as f64).ln());
        }
    }
    if xs.len() < MIN_SIZES {
        return Err(HurstError::DegenerateInput(format!(
            "{} usable block sizes, need {MIN_SIZES}",
            xs.len()
        )));
    }
    let fit = ordinary_linear_fit(&xs, &ys)?;
    Ok(HurstEstimate::new(Method::Rs, fit.slope)?
        .with_aux("correlation", fit.correlation)
        .with_aux("intercept", fit.intercept)
        .with_aux("slope_stderr", fit.slope_stderr)
        .with_aux("block_sizes", xs.len() as f64)
        .with_aux("skipped_blocks", skipped_blocks as f64))
}
