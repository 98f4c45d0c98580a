//! Weighted least-squares line fit shared by the slope-based estimators.

use crate::error::{HurstError, Result};

/// Result of [`weighted_linear_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual-based standard error of the slope (zero for an exact fit
    /// and for two-point fits).
    pub slope_stderr: f64,
    /// Weighted Pearson correlation between `x` and `y`.
    pub correlation: f64,
}

/// Minimizes `Σ wᵢ (yᵢ − a − b xᵢ)²`.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(HurstError::InvalidParameter(format!(
            "length mismatch: x={} y={} w={}",
            x.len(),
            y.len(),
            w.len()
        )));
    }
    if w.iter().any(|&wi| !(wi > 0.0 && wi.is_finite())) {
        return Err(HurstError::InvalidParameter("weights must be positive and finite".into()));
    }
    if x.len() < 2 {
        return Err(HurstError::SingularFit(format!("{} point(s) cannot define a line", x.len())));
    }

    let sw: f64 = w.iter().sum();
    let x_bar = x.iter().zip(w).map(|(xi, wi)| wi * xi).sum::<f64>() / sw;
    let y_bar = y.iter().zip(w).map(|(yi, wi)| wi * yi).sum::<f64>() / sw;

    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        let dx = xi - x_bar;
        let dy = yi - y_bar;
        sxx += wi * dx * dx;
        sxy += wi * dx * dy;
        syy += wi * dy * dy;
    }
    // Relative test: all x equal up to rounding.
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if sxx <= sw * (scale * 1e-12).powi(2) {
        return Err(HurstError::SingularFit("all x values are equal".into()));
    }

    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;

    let n = x.len();
    let slope_stderr = if n > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .zip(w)
            .map(|((&xi, &yi), &wi)| wi * (yi - intercept - slope * xi).powi(2))
            .sum();
        // Invariant under a common rescaling of the weights.
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    let correlation = if syy > 0.0 { sxy / (sxx * syy).sqrt() } else { 1.0 };

    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        correlation,
    })
}

/// Unweighted least squares.
pub fn ordinary_linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    weighted_linear_fit(x, y, &vec![1.0; x.len()])
}
