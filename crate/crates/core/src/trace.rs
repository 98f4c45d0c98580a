//! Real-trace workflow: capture ingestion and binning, sliding-window H
//! scans, phase disaggregation and convergence profiles.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HurstError, Result};
use crate::estimators::{EstimatorConfig, Method};
use crate::model::TimeSeries;

pub const DEFAULT_BIN_WIDTH: f64 = 0.01;
pub const DEFAULT_WINDOW: usize = 256;
pub const SCAN_CSV_HEADER: [&str; 6] = ["t_index", "start_time", "h_e", "method", "window", "stride"];
pub const PROFILE_CSV_HEADER: [&str; 5] = ["m", "mean_h", "spread", "phases", "failed"];

/// One captured frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureRecord {
    pub timestamp: f64,
    pub frame_bytes: u64,
}

/// What each bin accumulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinMode {
    #[default]
    Bytes,
    Packets,
}

/// Reads `timestamp,frame_bytes` rows; a non-numeric first row is taken as
/// a header.
pub fn parse_capture_csv<R: Read>(input: R, source: &Path) -> Result<Vec<CaptureRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let bad = |line: u64, message: String| HurstError::Ingest {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = row.position().map_or(idx as u64 + 1, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() < 2 {
            return Err(bad(line, format!("expected timestamp,frame_bytes; got {} field(s)", row.len())));
        }
        let timestamp = row[0].parse::<f64>();
        let bytes = row[1].parse::<u64>();
        match (timestamp, bytes) {
            (Ok(t), Ok(b)) => {
                if !t.is_finite() {
                    return Err(bad(line, format!("timestamp '{}' is not finite", &row[0])));
                }
                if b == 0 {
                    return Err(bad(line, "frame size must be at least 1 byte".into()));
                }
                records.push(CaptureRecord {
                    timestamp: t,
                    frame_bytes: b,
                });
            }
            _ if records.is_empty() && idx == 0 && row[0].parse::<f64>().is_err() => continue,
            _ => {
                return Err(bad(
                    line,
                    format!("cannot parse '{},{}' as timestamp,frame_bytes", &row[0], &row[1]),
                ))
            }
        }
    }
    if records.is_empty() {
        return Err(HurstError::EmptyInput(format!("{} contains no capture rows", source.display())));
    }
    Ok(records)
}

/// Uniform bins of `bin_width` seconds from the first to the last arrival;
/// bin `i` covers `[first + i·w, first + (i+1)·w)`.
pub fn bin_records(records: &[CaptureRecord], bin_width: f64, mode: BinMode) -> Result<TimeSeries> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(HurstError::InvalidParameter(format!("bin width must be positive, got {bin_width}")));
    }
    if records.is_empty() {
        return Err(HurstError::EmptyInput("no capture records".into()));
    }
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    let first = sorted[0].timestamp;
    let last = sorted[sorted.len() - 1].timestamp;
    // The nudge keeps arrivals that sit on a bin edge from rounding into the
    // previous bin.
    let index = |t: f64| ((t - first) / bin_width + 1e-9).floor() as usize;
    let bins = index(last) + 1;
    let mut totals = vec![0u64; bins];
    for r in &sorted {
        totals[index(r.timestamp)] += match mode {
            BinMode::Bytes => r.frame_bytes,
            BinMode::Packets => 1,
        };
    }
    TimeSeries::new(totals.into_iter().map(|v| v as f64).collect())?.with_time_base(first, bin_width)
}

pub fn ingest_capture_csv(path: &Path, bin_width: f64) -> Result<TimeSeries> {
    ingest_capture_csv_with(path, bin_width, BinMode::Bytes)
}

pub fn ingest_capture_csv_with(path: &Path, bin_width: f64, mode: BinMode) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|e| HurstError::io(path, e))?;
    let records = parse_capture_csv(file, path)?;
    bin_records(&records, bin_width, mode)
}

/// Sliding-window schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPlan {
    pub window: usize,
    pub stride: usize,
    pub method: Method,
}

impl ScanPlan {
    /// Windows must overlap: `0 < stride < window`.
    pub fn new(window: usize, stride: usize, method: Method) -> Result<Self> {
        if stride == 0 || stride >= window {
            return Err(HurstError::InvalidParameter(format!(
                "stride must satisfy 0 < stride < window, got stride={stride} window={window}"
            )));
        }
        Ok(Self { window, stride, method })
    }

    /// Window 2^8, stride half a window.
    pub fn with_defaults(method: Method) -> Self {
        Self {
            window: DEFAULT_WINDOW,
            stride: DEFAULT_WINDOW / 2,
            method,
        }
    }

    pub fn point_count(&self, len: usize) -> usize {
        if len < self.window {
            0
        } else {
            (len - self.window) / self.stride + 1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub t_index: usize,
    /// `None` where the estimator failed on this window.
    pub h_e: Option<f64>,
}

pub fn sliding_scan(series: &TimeSeries, plan: &ScanPlan) -> Result<Vec<ScanPoint>> {
    sliding_scan_with(series, plan, &EstimatorConfig::default())
}

pub fn sliding_scan_with(series: &TimeSeries, plan: &ScanPlan, config: &EstimatorConfig) -> Result<Vec<ScanPoint>> {
    if plan.stride == 0 || plan.stride >= plan.window {
        return Err(HurstError::InvalidParameter("scan plan needs 0 < stride < window".into()));
    }
    if series.len() < plan.window {
        return Err(HurstError::TooShort {
            required: plan.window,
            actual: series.len(),
        });
    }
    let starts: Vec<usize> = (0..plan.point_count(series.len())).map(|i| i * plan.stride).collect();
    starts
        .par_iter()
        .map(|&start| {
            let window = series.window(start, plan.window)?;
            Ok(ScanPoint {
                t_index: start,
                h_e: config.estimate(&window, plan.method).ok().map(|e| e.h_hat),
            })
        })
        .collect()
}

pub fn write_scan_csv<W: Write>(series: &TimeSeries, plan: &ScanPlan, points: &[ScanPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io_err = |e: csv::Error| HurstError::io("<scan csv>", std::io::Error::other(e));
    w.write_record(SCAN_CSV_HEADER).map_err(io_err)?;
    for p in points {
        w.write_record([
            p.t_index.to_string(),
            series.time_of(p.t_index).map(|t| t.to_string()).unwrap_or_default(),
            p.h_e.map(|h| h.to_string()).unwrap_or_default(),
            plan.method.as_str().to_owned(),
            plan.window.to_string(),
            plan.stride.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| HurstError::io("<scan csv>", e))
}

/// `m` interleaved subseries; phase `i` holds indices `≡ i (mod m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSet {
    pub m: usize,
    pub phases: Vec<TimeSeries>,
}

impl PhaseSet {
    /// Re-interleaves the phases into the original order.
    pub fn interleave(&self) -> Vec<f64> {
        let total: usize = self.phases.iter().map(TimeSeries::len).sum();
        let mut out = Vec::with_capacity(total);
        for k in 0.. {
            let before = out.len();
            for p in &self.phases {
                if let Some(&v) = p.values().get(k) {
                    out.push(v);
                }
            }
            if out.len() == before {
                break;
            }
        }
        out
    }
}

pub fn disaggregate_phases(series: &TimeSeries, m: usize) -> Result<PhaseSet> {
    if m == 0 || m > series.len() / 4 {
        return Err(HurstError::Size(format!(
            "factor {m} leaves phases shorter than 4 samples for length {}",
            series.len()
        )));
    }
    let values = series.values();
    let phases = (0..m)
        .map(|i| {
            let phase = TimeSeries::new(values.iter().skip(i).step_by(m).copied().collect())?;
            match (series.time_of(i), series.step()) {
                (Some(origin), Some(step)) => phase.with_time_base(origin, step * m as f64),
                _ => Ok(phase),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseSet { m, phases })
}

/// Mean and spread of per-phase estimates for one factor `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub m: usize,
    pub mean_h: Option<f64>,
    /// Sample standard deviation across phases (0 for a single phase).
    pub spread: Option<f64>,
    pub phases: usize,
    pub failed: usize,
}

pub fn convergence_profile(series: &TimeSeries, method: Method, m_values: &[usize]) -> Result<Vec<ProfileRow>> {
    convergence_profile_with(series, method, m_values, &EstimatorConfig::default())
}

pub fn convergence_profile_with(
    series: &TimeSeries,
    method: Method,
    m_values: &[usize],
    config: &EstimatorConfig,
) -> Result<Vec<ProfileRow>> {
    let sets = m_values
        .iter()
        .map(|&m| disaggregate_phases(series, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(sets
        .iter()
        .map(|set| {
            let estimates: Vec<Option<f64>> = set
                .phases
                .par_iter()
                .map(|p| config.estimate(p, method).ok().map(|e| e.h_hat))
                .collect();
            let ok: Vec<f64> = estimates.iter().flatten().copied().collect();
            let (mean_h, spread) = if ok.is_empty() {
                (None, None)
            } else {
                let mean = ok.iter().sum::<f64>() / ok.len() as f64;
                let spread = if ok.len() > 1 {
                    (ok.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (ok.len() - 1) as f64).sqrt()
                } else {
                    0.0
                };
                (Some(mean), Some(spread))
            };
            ProfileRow {
                m: set.m,
                mean_h,
                spread,
                phases: set.phases.len(),
                failed: estimates.len() - ok.len(),
            }
        })
        .collect())
}

pub fn write_profile_csv<W: Write>(rows: &[ProfileRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io_err = |e: csv::Error| HurstError::io("<profile csv>", std::io::Error::other(e));
    w.write_record(PROFILE_CSV_HEADER).map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.m.to_string(),
            r.mean_h.map(|v| v.to_string()).unwrap_or_default(),
            r.spread.map(|v| v.to_string()).unwrap_or_default(),
            r.phases.to_string(),
            r.failed.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| HurstError::io("<profile csv>", e))
}
