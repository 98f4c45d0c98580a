//! Periodogram and the low-frequency log-log slope estimator.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{is_effectively_constant, HurstEstimate, Method};
use crate::error::{HurstError, Result};
use crate::model::TimeSeries;
use crate::regression::ordinary_linear_fit;

pub const MIN_PERIODOGRAM_LEN: usize = 16;
pub const DEFAULT_LOWFREQ_FRACTION: f64 = 0.10;

/// `I(λ_j) = |Σ_t (x_t − x̄) e^{−i t λ_j}|² / (2πN)` at the Fourier
/// frequencies `λ_j = 2πj/N`, `j = 1..⌊(N−1)/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub frequencies: Vec<f64>,
    pub ordinates: Vec<f64>,
    /// Ordinate at λ = π, present for even N. Kept out of `ordinates` but
    /// needed to close Parseval's identity.
    pub nyquist: Option<f64>,
    pub n: usize,
}

impl Periodogram {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Mean squared deviation reconstructed from the ordinates:
    /// `(4π/N) Σ I(λ_j) + (2π/N) I(π)`.
    pub fn parseval_variance(&self) -> f64 {
        let n = self.n as f64;
        4.0 * PI / n * self.ordinates.iter().sum::<f64>() + 2.0 * PI / n * self.nyquist.unwrap_or(0.0)
    }
}

pub fn periodogram(series: &TimeSeries) -> Result<Periodogram> {
    let n = series.len();
    if n < MIN_PERIODOGRAM_LEN {
        return Err(HurstError::TooShort {
            required: MIN_PERIODOGRAM_LEN,
            actual: n,
        });
    }
    let count = (n - 1) / 2;
    let frequencies: Vec<f64> = (1..=count).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let values = series.values();
    let nyquist_present = n % 2 == 0;

    if values.iter().all(|&v| v == values[0]) {
        return Ok(Periodogram {
            frequencies,
            ordinates: vec![0.0; count],
            nyquist: nyquist_present.then_some(0.0),
            n,
        });
    }

    let mean = series.mean();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 2.0 * PI * n as f64;
    let ordinates = buf[1..=count].iter().map(|c| c.norm_sqr() / norm).collect();
    let nyquist = nyquist_present.then(|| buf[n / 2].norm_sqr() / norm);
    Ok(Periodogram {
        frequencies,
        ordinates,
        nyquist,
        n,
    })
}

/// OLS slope `s` of `log I(λ_j)` against `log λ_j` over the lowest
/// `lowfreq_fraction` of the Fourier frequencies; `H = (1 − s)/2`.
pub fn estimate_periodogram(series: &TimeSeries, lowfreq_fraction: f64) -> Result<HurstEstimate> {
    if !(lowfreq_fraction > 0.0 && lowfreq_fraction <= 0.5) {
        return Err(HurstError::InvalidParameter(format!(
            "low-frequency fraction must lie in (0, 0.5], got {lowfreq_fraction}"
        )));
    }
    if series.len() < 64 {
        return Err(HurstError::TooShort {
            required: 64,
            actual: series.len(),
        });
    }
    if is_effectively_constant(series.values()) {
        return Err(HurstError::DegenerateInput("constant series has no spectrum".into()));
    }
    let pg = periodogram(series)?;
    let count = (lowfreq_fraction * pg.len() as f64).floor() as usize;
    if count < 4 {
        return Err(HurstError::FitWindow(format!(
            "{count} frequencies in the fit window, need at least 4"
        )));
    }
    let (mut xs, mut ys) = (Vec::with_capacity(count), Vec::with_capacity(count));
    for (&lambda, &ordinate) in pg.frequencies.iter().zip(&pg.ordinates).take(count) {
        // An exactly zero ordinate carries no slope information.
        if ordinate > 0.0 {
            xs.push(lambda.ln());
            ys.push(ordinate.ln());
        }
    }
    if xs.len() < 4 {
        return Err(HurstError::FitWindow("fewer than 4 nonzero ordinates in the fit window".into()));
    }
    let fit = ordinary_linear_fit(&xs, &ys)?;
    let h = (1.0 - fit.slope) / 2.0;
    Ok(HurstEstimate::new(Method::Periodogram, h)?
        .with_aux("slope", fit.slope)
        .with_aux("slope_stderr", fit.slope_stderr)
        .with_aux("correlation", fit.correlation)
        .with_aux("frequencies", xs.len() as f64))
}
