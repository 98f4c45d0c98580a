//! Second-order exact self-similar (fGn) model: autocovariance, spectral
//! density, block aggregation and empirical correlation diagnostics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{HurstError, Result};
use crate::regression::weighted_linear_fit;

/// Default image-term cutoff for [`fgn_spectral_density`].
pub const DEFAULT_SPECTRAL_TRUNCATION: usize = 200;

/// Default smallest lag used by [`acf_tail_fit`].
pub const DEFAULT_TAIL_MIN_LAG: usize = 10;

/// Hurst exponent and variance of a fractional Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgnModel {
    h: f64,
    sigma2: f64,
}

impl FgnModel {
    pub fn new(h: f64, sigma2: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(HurstError::InvalidParameter(format!(
                "Hurst exponent must lie in (0, 1), got {h}"
            )));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(HurstError::InvalidParameter(format!(
                "variance must be positive and finite, got {sigma2}"
            )));
        }
        Ok(Self { h, sigma2 })
    }

    /// Unit-variance model.
    pub fn standard(h: f64) -> Result<Self> {
        Self::new(h, 1.0)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// A finite sequence of finite samples with an optional uniform time base.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    origin: Option<f64>,
    step: Option<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(HurstError::EmptyInput("time series has no samples".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(HurstError::InvalidParameter(format!(
                "sample {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self {
            values,
            origin: None,
            step: None,
        })
    }

    /// Attaches a start time and sample spacing, both in seconds.
    pub fn with_time_base(mut self, origin: f64, step: f64) -> Result<Self> {
        if !origin.is_finite() || !(step > 0.0 && step.is_finite()) {
            return Err(HurstError::InvalidParameter(format!(
                "invalid time base origin={origin} step={step}"
            )));
        }
        self.origin = Some(origin);
        self.step = Some(step);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn origin(&self) -> Option<f64> {
        self.origin
    }

    pub fn step(&self) -> Option<f64> {
        self.step
    }

    /// Time of sample `index`, when a time base is attached.
    pub fn time_of(&self, index: usize) -> Option<f64> {
        Some(self.origin? + index as f64 * self.step?)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Variance with the 1/N normalization.
    pub fn biased_variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.values.len() as f64
    }

    /// Contiguous sub-series `[start, start + len)` with the time base shifted accordingly.
    pub fn window(&self, start: usize, len: usize) -> Result<TimeSeries> {
        let end = start
            .checked_add(len)
            .filter(|&e| e <= self.values.len() && len > 0)
            .ok_or_else(|| {
                HurstError::Size(format!(
                    "window [{start}, {start}+{len}) exceeds series length {}",
                    self.values.len()
                ))
            })?;
        Ok(TimeSeries {
            values: self.values[start..end].to_vec(),
            origin: self.time_of(start),
            step: self.step,
        })
    }
}

/// Autocovariance values indexed by consecutive lags starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovarianceCurve {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    pub tail_beta: Option<f64>,
    pub tail_c: Option<f64>,
}

impl AutocovarianceCurve {
    /// Exact fGn autocovariance for lags `0..=max_lag`.
    pub fn theoretical(model: &FgnModel, max_lag: usize) -> Self {
        let lags: Vec<usize> = (0..=max_lag).collect();
        let values = lags.iter().map(|&k| fgn_autocovariance(model, k)).collect();
        Self {
            lags,
            values,
            tail_beta: None,
            tail_c: None,
        }
    }

    pub fn at(&self, lag: usize) -> Option<f64> {
        self.values.get(lag).copied()
    }
}

/// fGn spectral density sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    pub frequencies: Vec<f64>,
    pub density: Vec<f64>,
    pub truncation: usize,
}

impl SpectralModel {
    pub fn evaluate(model: &FgnModel, frequencies: &[f64], truncation: usize) -> Result<Self> {
        let density = frequencies
            .iter()
            .map(|&lambda| fgn_spectral_density(model, lambda, truncation))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            frequencies: frequencies.to_vec(),
            density,
            truncation,
        })
    }
}

/// Autocovariance of fGn at lag `k`:
/// `σ²/2 · ((k+1)^{2H} − 2k^{2H} + (k−1)^{2H})`, and `σ²` at lag 0.
pub fn fgn_autocovariance(model: &FgnModel, k: usize) -> f64 {
    let (h, sigma2) = (model.h, model.sigma2);
    if k == 0 {
        return sigma2;
    }
    // The second difference vanishes identically for H = 1/2.
    if h == 0.5 {
        return 0.0;
    }
    let two_h = 2.0 * h;
    if k == 1 {
        return 0.5 * sigma2 * (2f64.powf(two_h) - 2.0);
    }
    // k^{2H} · [(1+1/k)^{2H} − 2 + (1−1/k)^{2H}], written with expm1/ln_1p
    // so the second difference keeps its precision at large lags.
    let kf = k as f64;
    let x = 1.0 / kf;
    let second_diff = (two_h * x.ln_1p()).exp_m1() + (two_h * (-x).ln_1p()).exp_m1();
    0.5 * sigma2 * kf.powf(two_h) * second_diff
}

/// Normalizing constant mapping the image sum onto a density that
/// integrates to σ² over (−π, π).
pub(crate) fn spectral_constant(h: f64) -> f64 {
    (PI * h).sin() * gamma(2.0 * h + 1.0) / PI
}

/// `1 − cos λ` without cancellation for small λ.
pub(crate) fn one_minus_cos(lambda: f64) -> f64 {
    2.0 * (0.5 * lambda).sin().powi(2)
}

/// `Σ_{j=-K..K} |2πj + λ|^{-a}` plus an Euler–Maclaurin estimate of the
/// terms with `|j| > K`.
pub(crate) fn image_sum(lambda: f64, a: f64, truncation: usize) -> f64 {
    let mut sum = lambda.powf(-a);
    for j in 1..=truncation {
        let base = 2.0 * PI * j as f64;
        sum += (base + lambda).powf(-a) + (base - lambda).powf(-a);
    }
    let edge = 2.0 * PI * (truncation + 1) as f64;
    sum + image_tail(edge + lambda, a) + image_tail(edge - lambda, a)
}

/// Euler–Maclaurin approximation of `Σ_{i≥0} (u + 2πi)^{-a}`.
pub(crate) fn image_tail(u: f64, a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let pow_a = u.powf(-a);
    let inv = 1.0 / u;
    pow_a
        * (u / (two_pi * (a - 1.0)) + 0.5 + a * two_pi * inv / 12.0
            - a * (a + 1.0) * (a + 2.0) * two_pi.powi(3) * inv.powi(3) / 720.0)
}

/// fGn spectral density at angular frequency `lambda ∈ (0, π]`, normalized
/// so that its integral over (−π, π) equals σ².
pub fn fgn_spectral_density(model: &FgnModel, lambda: f64, truncation: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= PI) {
        return Err(HurstError::Domain(format!(
            "frequency must lie in (0, π], got {lambda}"
        )));
    }
    if truncation == 0 {
        return Err(HurstError::InvalidParameter(
            "spectral truncation must be at least 1".into(),
        ));
    }
    let a = 2.0 * model.h + 1.0;
    Ok(model.sigma2
        * spectral_constant(model.h)
        * one_minus_cos(lambda)
        * image_sum(lambda, a, truncation))
}

/// Block-mean aggregation: entry `i` is the mean of samples `[im, (i+1)m)`.
/// Trailing samples that do not fill a block are dropped.
pub fn aggregate_blocks(series: &TimeSeries, m: usize) -> Result<TimeSeries> {
    if m == 0 || m > series.len() {
        return Err(HurstError::Size(format!(
            "aggregation factor {m} invalid for series of length {}",
            series.len()
        )));
    }
    let values = series
        .values
        .chunks_exact(m)
        .map(|block| block.iter().sum::<f64>() / m as f64)
        .collect();
    let mut out = TimeSeries::new(values)?;
    if let (Some(origin), Some(step)) = (series.origin, series.step) {
        out = out.with_time_base(origin, step * m as f64)?;
    }
    Ok(out)
}

/// Biased (1/N) sample autocovariance at lags `0..=max_lag`.
pub fn empirical_autocovariance(series: &TimeSeries, max_lag: usize) -> Result<AutocovarianceCurve> {
    let n = series.len();
    if max_lag >= n {
        return Err(HurstError::Size(format!(
            "max lag {max_lag} must be below series length {n}"
        )));
    }
    let mean = series.mean();
    let centered: Vec<f64> = series.values.iter().map(|v| v - mean).collect();
    let values = (0..=max_lag)
        .map(|k| {
            centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect();
    Ok(AutocovarianceCurve {
        lags: (0..=max_lag).collect(),
        values,
        tail_beta: None,
        tail_c: None,
    })
}

/// Least-squares fit of `log ρ(k) = log c − β log k` over lags `≥ k_min`.
/// Returns `(β, c)`.
pub fn acf_tail_fit(curve: &AutocovarianceCurve, k_min: usize) -> Result<(f64, f64)> {
    let k_min = k_min.max(1);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&lag, &value) in curve.lags.iter().zip(&curve.values) {
        if lag < k_min {
            continue;
        }
        if !(value > 0.0) {
            return Err(HurstError::FitDomain(format!(
                "autocovariance at lag {lag} is {value}; no hyperbolic decay to fit"
            )));
        }
        xs.push((lag as f64).ln());
        ys.push(value.ln());
    }
    if xs.len() < 5 {
        return Err(HurstError::FitDomain(format!(
            "need at least 5 positive lags ≥ {k_min}, found {}",
            xs.len()
        )));
    }
    let weights = vec![1.0; xs.len()];
    let fit = weighted_linear_fit(&xs, &ys, &weights)?;
    Ok((-fit.slope, fit.intercept.exp()))
}

/// Runs [`acf_tail_fit`] and records the result on the curve.
pub fn with_tail_fit(mut curve: AutocovarianceCurve, k_min: usize) -> Result<AutocovarianceCurve> {
    let (beta, c) = acf_tail_fit(&curve, k_min)?;
    curve.tail_beta = Some(beta);
    curve.tail_c = Some(c);
    Ok(curve)
}
