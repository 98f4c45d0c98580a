//! Flat `key = value` sweep configuration files. Keys mirror the `sweep`
//! flags; `#` starts a comment.

use std::path::Path;
use std::str::FromStr;

use hurst_core::estimators::Wavelet;
use hurst_core::{Method, PrecisionTarget, SweepConfig};

use crate::error::{CliError, CliResult};

/// Every setting a sweep can take; unset fields fall back to the preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSettings {
    pub preset: Option<Preset>,
    pub h_values: Option<Vec<f64>>,
    pub log2_n_values: Option<Vec<u32>>,
    pub replications: Option<usize>,
    pub estimators: Option<Vec<Method>>,
    pub base_seed: Option<u64>,
    pub threads: Option<usize>,
    pub target: Option<PrecisionTarget>,
    pub whittle_truncation: Option<usize>,
    pub av_j1: Option<u32>,
    pub av_j2: Option<u32>,
    pub wavelet: Option<Wavelet>,
    pub lowfreq_fraction: Option<f64>,
    pub rs_min_block: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    PaperDefaults,
    Quick,
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.replace('_', "-").as_str() {
            "paper-defaults" | "paper" => Ok(Preset::PaperDefaults),
            "quick" => Ok(Preset::Quick),
            other => Err(CliError::Usage(format!("unknown preset '{other}'"))),
        }
    }
}

pub fn parse_wavelet(s: &str) -> CliResult<Wavelet> {
    match s.to_ascii_lowercase().as_str() {
        "haar" | "db1" => Ok(Wavelet::Haar),
        "db3" | "daubechies3" => Ok(Wavelet::Daubechies3),
        other => Err(CliError::Usage(format!("unknown wavelet '{other}'"))),
    }
}

/// Comma-separated values; integer lists also accept `a..=b`.
pub fn parse_list<T: FromStr>(s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| CliError::Usage(format!("cannot parse '{t}'"))))
        .collect()
}

pub fn parse_exponents(s: &str) -> CliResult<Vec<u32>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = part.split_once("..=") {
            let (a, b): (u32, u32) = (
                a.trim().parse().map_err(|_| CliError::Usage(format!("bad range '{part}'")))?,
                b.trim().parse().map_err(|_| CliError::Usage(format!("bad range '{part}'")))?,
            );
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| CliError::Usage(format!("cannot parse '{part}'")))?);
        }
    }
    Ok(out)
}

pub fn parse_methods(s: &str) -> CliResult<Vec<Method>> {
    if s.trim() == "all" {
        return Ok(Method::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Method>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value '{value}' for '{key}'")))
}

impl SweepSettings {
    pub fn parse(text: &str, source: &Path) -> CliResult<Self> {
        let mut s = SweepSettings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected key = value", source.display(), idx + 1))
            })?;
            let (key, value) = (key.trim().replace('_', "-"), value.trim());
            let at = |e: CliError| CliError::Usage(format!("{}:{}: {e}", source.display(), idx + 1));
            match key.as_str() {
                "preset" => s.preset = Some(value.parse().map_err(at)?),
                "h" | "h-values" => s.h_values = Some(parse_list(value).map_err(at)?),
                "log2-n" => s.log2_n_values = Some(parse_exponents(value).map_err(at)?),
                "replications" => s.replications = Some(parse_scalar(&key, value).map_err(at)?),
                "estimators" => s.estimators = Some(parse_methods(value).map_err(at)?),
                "base-seed" => s.base_seed = Some(parse_scalar(&key, value).map_err(at)?),
                "threads" => s.threads = Some(parse_scalar(&key, value).map_err(at)?),
                "target" => {
                    s.target = Some(value.parse().map_err(|e: hurst_core::HurstError| at(CliError::Usage(e.to_string())))?)
                }
                "whittle-truncation" => s.whittle_truncation = Some(parse_scalar(&key, value).map_err(at)?),
                "av-j1" => s.av_j1 = Some(parse_scalar(&key, value).map_err(at)?),
                "av-j2" => s.av_j2 = Some(parse_scalar(&key, value).map_err(at)?),
                "wavelet" => s.wavelet = Some(parse_wavelet(value).map_err(at)?),
                "lowfreq-fraction" => s.lowfreq_fraction = Some(parse_scalar(&key, value).map_err(at)?),
                "rs-min-block" => s.rs_min_block = Some(parse_scalar(&key, value).map_err(at)?),
                other => return Err(at(CliError::Usage(format!("unknown key '{other}'")))),
            }
        }
        Ok(s)
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: SweepSettings) -> SweepSettings {
        SweepSettings {
            preset: other.preset.or(self.preset),
            h_values: other.h_values.or(self.h_values),
            log2_n_values: other.log2_n_values.or(self.log2_n_values),
            replications: other.replications.or(self.replications),
            estimators: other.estimators.or(self.estimators),
            base_seed: other.base_seed.or(self.base_seed),
            threads: other.threads.or(self.threads),
            target: other.target.or(self.target),
            whittle_truncation: other.whittle_truncation.or(self.whittle_truncation),
            av_j1: other.av_j1.or(self.av_j1),
            av_j2: other.av_j2.or(self.av_j2),
            wavelet: other.wavelet.or(self.wavelet),
            lowfreq_fraction: other.lowfreq_fraction.or(self.lowfreq_fraction),
            rs_min_block: other.rs_min_block.or(self.rs_min_block),
        }
    }

    pub fn to_config(&self) -> CliResult<SweepConfig> {
        let seed = self
            .base_seed
            .ok_or_else(|| CliError::Usage("sweep requires --base-seed (or base-seed in the config file)".into()))?;
        let mut config = match self.preset {
            Some(Preset::Quick) => SweepConfig::quick(seed),
            _ => SweepConfig::paper_defaults(seed),
        };
        if let Some(v) = &self.h_values {
            config.h_values = v.clone();
        }
        if let Some(v) = &self.log2_n_values {
            config.log2_n_values = v.clone();
        }
        if let Some(v) = self.replications {
            config.replications = v;
        }
        if let Some(v) = &self.estimators {
            config.estimators = v.clone();
        }
        let ec = &mut config.estimator_config;
        if let Some(v) = self.whittle_truncation {
            ec.whittle_truncation = v;
        }
        if self.av_j1.is_some() {
            ec.av_j1 = self.av_j1;
        }
        if self.av_j2.is_some() {
            ec.av_j2 = self.av_j2;
        }
        if let Some(v) = self.wavelet {
            ec.wavelet = v;
        }
        if let Some(v) = self.lowfreq_fraction {
            ec.lowfreq_fraction = v;
        }
        if let Some(v) = self.rs_min_block {
            ec.rs_min_block = v;
        }
        config
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}
