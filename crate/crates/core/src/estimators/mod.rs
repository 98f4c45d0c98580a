//! The four Hurst estimators and their shared signal primitives.

mod optimize;
pub mod periodogram;
pub mod rs;
pub mod wavelet;
pub mod whittle;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HurstError, Result};
use crate::model::TimeSeries;

pub use periodogram::{estimate_periodogram, periodogram, Periodogram, DEFAULT_LOWFREQ_FRACTION};
pub use rs::{estimate_rs, rs_block_sizes, DEFAULT_MIN_BLOCK};
pub use wavelet::{
    dwt_detail_variances, estimate_abry_veitch, max_usable_level, LogscaleDiagram, Wavelet,
    DEFAULT_J1,
};
pub use whittle::{estimate_whittle, DEFAULT_WHITTLE_TRUNCATION};

/// Estimator identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Whittle,
    AbryVeitch,
    Periodogram,
    Rs,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Whittle, Method::AbryVeitch, Method::Periodogram, Method::Rs];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Whittle => "whittle",
            Method::AbryVeitch => "abry_veitch",
            Method::Periodogram => "periodogram",
            Method::Rs => "rs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = HurstError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "whittle" => Ok(Method::Whittle),
            "abry_veitch" | "av" | "wavelet" => Ok(Method::AbryVeitch),
            "periodogram" => Ok(Method::Periodogram),
            "rs" | "r/s" => Ok(Method::Rs),
            other => Err(HurstError::InvalidParameter(format!("unknown estimator '{other}'"))),
        }
    }
}

/// Output of any estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub h_hat: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_high: Option<f64>,
    /// Set when `h_hat > 1`; the value is reported as computed.
    pub non_stationary: bool,
    pub aux: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl HurstEstimate {
    pub(crate) fn new(method: Method, h_hat: f64) -> Result<Self> {
        if !h_hat.is_finite() {
            return Err(HurstError::NumericFailure(format!("{method} produced H = {h_hat}")));
        }
        Ok(Self {
            h_hat,
            method,
            ci_low: None,
            ci_high: None,
            non_stationary: h_hat > 1.0,
            aux: BTreeMap::new(),
            warnings: Vec::new(),
        })
    }

    pub(crate) fn with_ci(mut self, half_width: f64) -> Self {
        if half_width.is_finite() {
            self.ci_low = Some(self.h_hat - half_width);
            self.ci_high = Some(self.h_hat + half_width);
        }
        self
    }

    pub(crate) fn with_aux(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_owned(), value);
        self
    }
}

/// Tuning knobs for every estimator; `Default` gives the documented defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub whittle_truncation: usize,
    /// Finest octave for Abry–Veitch; `None` picks 3, lowered when the series
    /// is too short to leave three octaves.
    pub av_j1: Option<u32>,
    /// Coarsest octave; `None` uses the coarsest with at least 4 coefficients.
    pub av_j2: Option<u32>,
    pub wavelet: Wavelet,
    pub lowfreq_fraction: f64,
    pub rs_min_block: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            whittle_truncation: DEFAULT_WHITTLE_TRUNCATION,
            av_j1: None,
            av_j2: None,
            wavelet: Wavelet::Daubechies3,
            lowfreq_fraction: DEFAULT_LOWFREQ_FRACTION,
            rs_min_block: DEFAULT_MIN_BLOCK,
        }
    }
}

impl EstimatorConfig {
    pub fn estimate(&self, series: &TimeSeries, method: Method) -> Result<HurstEstimate> {
        match method {
            Method::Whittle => estimate_whittle(series, self.whittle_truncation),
            Method::AbryVeitch => {
                let (j1, j2) = wavelet::resolve_levels(series.len(), self.av_j1, self.av_j2)?;
                wavelet::estimate_abry_veitch_with(series, j1, j2, self.wavelet)
            }
            Method::Periodogram => estimate_periodogram(series, self.lowfreq_fraction),
            Method::Rs => estimate_rs(series, self.rs_min_block),
        }
    }
}

/// Convenience wrapper using [`EstimatorConfig::default`].
pub fn estimate(series: &TimeSeries, method: Method) -> Result<HurstEstimate> {
    EstimatorConfig::default().estimate(series, method)
}

/// True when every sample equals the first up to relative rounding.
pub(crate) fn is_effectively_constant(values: &[f64]) -> bool {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let scale = lo.abs().max(hi.abs());
    hi - lo <= scale * 1e-12
}
