//! Periodic orthonormal pyramid DWT, logscale diagram and the Abry–Veitch
//! wavelet estimator.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use super::{HurstEstimate, Method};
use crate::error::{HurstError, Result};
use crate::model::TimeSeries;
use crate::regression::weighted_linear_fit;

pub const DEFAULT_J1: u32 = 3;
/// Fewest detail coefficients a usable octave may hold.
pub const MIN_COEFFICIENTS: usize = 4;
const MIN_LEVELS: usize = 3;
const Z_95: f64 = 1.959_963_984_540_054;

/// Daubechies-3 (six taps, three vanishing moments) scaling filter.
const DB3: [f64; 6] = [
    0.332_670_552_950_082_616,
    0.806_891_509_311_092_576,
    0.459_877_502_118_491_570,
    -0.135_011_020_010_254_589,
    -0.085_441_273_882_026_662,
    0.035_226_291_885_709_537,
];
const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Wavelet {
    Haar,
    #[default]
    Daubechies3,
}

impl Wavelet {
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Daubechies3 => &DB3,
        }
    }

    /// Quadrature mirror `g[n] = (−1)^n h[L−1−n]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let len = h.len();
        (0..len)
            .map(|n| if n % 2 == 0 { h[len - 1 - n] } else { -h[len - 1 - n] })
            .collect()
    }
}

/// Detail coefficients per octave plus the final approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    /// `details[j-1]` holds octave `j`.
    pub details: Vec<Vec<f64>>,
    pub approximation: Vec<f64>,
}

/// Periodic pyramid transform down to `levels` octaves. A sample is dropped
/// whenever a level has odd length.
pub fn dwt_pyramid(values: &[f64], levels: u32, wavelet: Wavelet) -> Pyramid {
    let h = wavelet.lowpass();
    let g = wavelet.highpass();
    let mut approx = values.to_vec();
    let mut details = Vec::with_capacity(levels as usize);
    for _ in 0..levels {
        let len = approx.len() & !1;
        let half = len / 2;
        let mut next = vec![0.0; half];
        let mut detail = vec![0.0; half];
        for k in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (n, (&hn, &gn)) in h.iter().zip(&g).enumerate() {
                let x = approx[(2 * k + n) % len];
                a += hn * x;
                d += gn * x;
            }
            next[k] = a;
            detail[k] = d;
        }
        details.push(detail);
        approx = next;
    }
    Pyramid {
        details,
        approximation: approx,
    }
}

/// Number of detail coefficients at octave `j` for a length-`n` input.
fn coefficients_at(n: usize, j: u32) -> usize {
    let mut len = n;
    for _ in 0..j {
        len /= 2;
    }
    len
}

/// Coarsest octave holding at least [`MIN_COEFFICIENTS`] coefficients.
pub fn max_usable_level(n: usize) -> u32 {
    let mut j = 0;
    while coefficients_at(n, j + 1) >= MIN_COEFFICIENTS {
        j += 1;
    }
    j
}

/// Expected bias of `log₂` of a mean of `n` squared Gaussian coefficients:
/// `ψ(n/2)/ln 2 − log₂(n/2)`.
pub fn log2_bias_correction(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    digamma(half) / LN_2 - half.log2()
}

/// Octave-wise energy of the detail coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LogscaleDiagram {
    pub levels: Vec<u32>,
    /// Bias-corrected `log₂ μ_j`.
    pub log_variances: Vec<f64>,
    pub counts: Vec<usize>,
    /// Inverse variances `n_j (ln 2)² / 2` of the log-variances.
    pub weights: Vec<f64>,
    /// Uncorrected mean squared coefficients `μ_j`.
    pub mean_squares: Vec<f64>,
}

impl LogscaleDiagram {
    /// Restricts the diagram to octaves `j1..=j2`.
    pub fn select(&self, j1: u32, j2: u32) -> LogscaleDiagram {
        let keep: Vec<usize> = self
            .levels
            .iter()
            .enumerate()
            .filter(|(_, &j)| j >= j1 && j <= j2)
            .map(|(i, _)| i)
            .collect();
        let pick = |v: &Vec<f64>| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        LogscaleDiagram {
            levels: keep.iter().map(|&i| self.levels[i]).collect(),
            log_variances: pick(&self.log_variances),
            counts: keep.iter().map(|&i| self.counts[i]).collect(),
            weights: pick(&self.weights),
            mean_squares: pick(&self.mean_squares),
        }
    }
}

/// Logscale diagram for octaves `1..=max_level`.
pub fn dwt_detail_variances(series: &TimeSeries, max_level: u32, wavelet: Wavelet) -> Result<LogscaleDiagram> {
    if max_level == 0 {
        return Err(HurstError::LevelRange("at least one octave is required".into()));
    }
    let n = series.len();
    let available = coefficients_at(n, max_level);
    if available < MIN_COEFFICIENTS {
        return Err(HurstError::LevelRange(format!(
            "octave {max_level} leaves {available} coefficients for N = {n}, need {MIN_COEFFICIENTS}"
        )));
    }
    let pyramid = dwt_pyramid(series.values(), max_level, wavelet);
    let mut diagram = LogscaleDiagram {
        levels: Vec::new(),
        log_variances: Vec::new(),
        counts: Vec::new(),
        weights: Vec::new(),
        mean_squares: Vec::new(),
    };
    for (j, detail) in (1..=max_level).zip(&pyramid.details) {
        let count = detail.len();
        let mu = detail.iter().map(|d| d * d).sum::<f64>() / count as f64;
        diagram.levels.push(j);
        diagram.counts.push(count);
        diagram.mean_squares.push(mu);
        diagram.log_variances.push(mu.log2() - log2_bias_correction(count));
        diagram.weights.push(count as f64 * LN_2 * LN_2 / 2.0);
    }
    Ok(diagram)
}

/// Default octave range for a series of length `n`: `j2` is the coarsest
/// usable octave; `j1` is 3 unless that leaves fewer than three octaves.
pub(crate) fn resolve_levels(n: usize, j1: Option<u32>, j2: Option<u32>) -> Result<(u32, u32)> {
    let top = max_usable_level(n);
    let j2 = j2.unwrap_or(top);
    let j1 = j1.unwrap_or_else(|| {
        if j2 + 1 >= DEFAULT_J1 + MIN_LEVELS as u32 {
            DEFAULT_J1
        } else {
            (j2 + 1).saturating_sub(MIN_LEVELS as u32).max(1)
        }
    });
    Ok((j1, j2))
}

/// Abry–Veitch estimate from the weighted slope of octaves `j1..=j2`.
pub fn estimate_abry_veitch(series: &TimeSeries, j1: u32, j2: u32) -> Result<HurstEstimate> {
    estimate_abry_veitch_with(series, j1, j2, Wavelet::Daubechies3)
}

pub fn estimate_abry_veitch_with(series: &TimeSeries, j1: u32, j2: u32, wavelet: Wavelet) -> Result<HurstEstimate> {
    if j1 == 0 || j2 < j1 {
        return Err(HurstError::LevelRange(format!("invalid octave range [{j1}, {j2}]")));
    }
    let levels = (j2 - j1 + 1) as usize;
    if levels < MIN_LEVELS {
        return Err(HurstError::LevelRange(format!(
            "octaves [{j1}, {j2}] give {levels} usable levels, need {MIN_LEVELS}"
        )));
    }
    let diagram = dwt_detail_variances(series, j2, wavelet)?.select(j1, j2);
    if diagram.mean_squares.iter().any(|&mu| !(mu > 0.0)) {
        return Err(HurstError::DegenerateInput("zero detail energy at some octave".into()));
    }

    let xs: Vec<f64> = diagram.levels.iter().map(|&j| j as f64).collect();
    let fit = weighted_linear_fit(&xs, &diagram.log_variances, &diagram.weights)?;
    // Weights are known inverse variances, so the slope variance is 1/Sxx_w.
    let sw: f64 = diagram.weights.iter().sum();
    let x_bar = xs.iter().zip(&diagram.weights).map(|(x, w)| x * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&diagram.weights).map(|(x, w)| w * (x - x_bar).powi(2)).sum();
    let slope_sd = sxx.recip().sqrt();

    let h = (fit.slope + 1.0) / 2.0;
    Ok(HurstEstimate::new(Method::AbryVeitch, h)?
        .with_ci(Z_95 * slope_sd / 2.0)
        .with_aux("slope", fit.slope)
        .with_aux("slope_sd", slope_sd)
        .with_aux("intercept", fit.intercept)
        .with_aux("correlation", fit.correlation)
        .with_aux("j1", j1 as f64)
        .with_aux("j2", j2 as f64))
}
