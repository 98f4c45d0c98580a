//! Monte-Carlo sweep over (estimator, H₀, N): bias / deviation / MSE per
//! cell, precision banding, and minimum-length determination.
//!
//! Every replication draws its series from a seed derived by
//! [`replication_seed`], a fixed SplitMix64 avalanche of
//! `(base_seed, h_index, n_index, r)`:
//!
//! ```text
//! packed = (h_index & 0xFFFF) << 48 | (n_index & 0xFFFF) << 32 | (r & 0xFFFF_FFFF)
//! seed   = splitmix64(splitmix64(base_seed) ^ packed)
//! ```
//!
//! All estimators in a cell see the same series, and results are reduced in
//! replication order, so output does not depend on the worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use log::{debug, trace, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HurstError, Result};
use crate::estimators::{EstimatorConfig, Method};
use crate::model::{FgnModel, TimeSeries};
use crate::synthesis::FgnGenerator;

pub const METRICS_CSV_HEADER: [&str; 10] = [
    "estimator",
    "h0",
    "log2_n",
    "replications",
    "failures",
    "mean",
    "bias",
    "sigma",
    "mse",
    "label",
];

/// Failure share above which a row is flagged.
pub const FAILURE_FLAG_FRACTION: f64 = 0.05;

pub const HIGH_PRECISION_BIAS: f64 = 0.03;
pub const HIGH_PRECISION_SIGMA: f64 = 0.01;
pub const ACCEPTABLE_BIAS: f64 = 0.05;
pub const ACCEPTABLE_SIGMA: f64 = 0.02;
pub const BIASED_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub h_values: Vec<f64>,
    pub log2_n_values: Vec<u32>,
    pub replications: usize,
    pub estimators: Vec<Method>,
    pub base_seed: u64,
    #[serde(default)]
    pub estimator_config: EstimatorConfig,
}

impl SweepConfig {
    /// H₀ ∈ {0.5, …, 0.9}, N = 2^6 … 2^16, 200 replications, all estimators.
    pub fn paper_defaults(base_seed: u64) -> Self {
        Self {
            h_values: vec![0.5, 0.6, 0.7, 0.8, 0.9],
            log2_n_values: (6..=16).collect(),
            replications: 200,
            estimators: Method::ALL.to_vec(),
            base_seed,
            estimator_config: EstimatorConfig::default(),
        }
    }

    /// Reduced grid for smoke runs: 20 replications, N up to 2^13.
    pub fn quick(base_seed: u64) -> Self {
        Self {
            log2_n_values: (6..=13).collect(),
            replications: 20,
            ..Self::paper_defaults(base_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(HurstError::InvalidParameter("at least 2 replications are required".into()));
        }
        if self.h_values.is_empty() || self.log2_n_values.is_empty() || self.estimators.is_empty() {
            return Err(HurstError::InvalidParameter(
                "H values, lengths and estimators must all be non-empty".into(),
            ));
        }
        for &h in &self.h_values {
            FgnModel::standard(h)?;
        }
        if let Some(&i) = self.log2_n_values.iter().find(|&&i| !(1..=30).contains(&i)) {
            return Err(HurstError::InvalidParameter(format!("log2 length {i} outside 1..=30")));
        }
        Ok(())
    }

    pub fn series_count(&self) -> usize {
        self.h_values.len() * self.log2_n_values.len() * self.replications
    }
}

/// Precision band of a (bias, σ) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionLabel {
    HighPrecision,
    Acceptable,
    Biased,
    Inconclusive,
}

impl PrecisionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PrecisionLabel::HighPrecision => "high_precision",
            PrecisionLabel::Acceptable => "acceptable",
            PrecisionLabel::Biased => "biased",
            PrecisionLabel::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for PrecisionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecisionLabel {
    type Err = HurstError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high_precision" => Ok(PrecisionLabel::HighPrecision),
            "acceptable" => Ok(PrecisionLabel::Acceptable),
            "biased" => Ok(PrecisionLabel::Biased),
            "inconclusive" => Ok(PrecisionLabel::Inconclusive),
            other => Err(HurstError::InvalidParameter(format!("unknown label '{other}'"))),
        }
    }
}

/// Bands on `|bias|`: high precision `≤ 0.03` with `σ ≤ 0.01`; acceptable
/// `(0.03, 0.05)` with `σ ≤ 0.02`; biased `> 0.1`; anything else is
/// inconclusive.
pub fn classify_precision(bias: f64, sigma: f64) -> PrecisionLabel {
    let b = bias.abs();
    if b <= HIGH_PRECISION_BIAS && sigma <= HIGH_PRECISION_SIGMA {
        PrecisionLabel::HighPrecision
    } else if b > HIGH_PRECISION_BIAS && b < ACCEPTABLE_BIAS && sigma <= ACCEPTABLE_SIGMA {
        PrecisionLabel::Acceptable
    } else if b > BIASED_THRESHOLD {
        PrecisionLabel::Biased
    } else {
        PrecisionLabel::Inconclusive
    }
}

/// Threshold used when searching for a minimum length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionTarget {
    /// `|b| ≤ 0.03` and `σ ≤ 0.01`.
    HighPrecision,
    /// Inside the union of the high-precision and acceptable bands:
    /// `|b| < 0.05` and `σ ≤ 0.02`.
    AcceptableOrBetter,
}

impl PrecisionTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            PrecisionTarget::HighPrecision => "high_precision",
            PrecisionTarget::AcceptableOrBetter => "acceptable_or_better",
        }
    }

    pub fn is_met(self, bias: f64, sigma: f64) -> bool {
        let b = bias.abs();
        match self {
            PrecisionTarget::HighPrecision => b <= HIGH_PRECISION_BIAS && sigma <= HIGH_PRECISION_SIGMA,
            PrecisionTarget::AcceptableOrBetter => b < ACCEPTABLE_BIAS && sigma <= ACCEPTABLE_SIGMA,
        }
    }
}

impl fmt::Display for PrecisionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecisionTarget {
    type Err = HurstError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "high_precision" | "high" => Ok(PrecisionTarget::HighPrecision),
            "acceptable_or_better" | "acceptable" => Ok(PrecisionTarget::AcceptableOrBetter),
            other => Err(HurstError::InvalidParameter(format!("unknown precision target '{other}'"))),
        }
    }
}

/// Summary statistics of a set of estimates against a nominal H₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mean: f64,
    /// `H₀ − mean`.
    pub bias: f64,
    /// Sample standard deviation (R − 1 denominator).
    pub sigma: f64,
    /// `(1/R) Σ (Ĥᵢ − H₀)²`.
    pub mse: f64,
}

pub fn compute_metrics(estimates: &[f64], h0: f64) -> Result<Metrics> {
    if estimates.len() < 2 {
        return Err(HurstError::InsufficientData(format!(
            "{} estimate(s); at least 2 are needed",
            estimates.len()
        )));
    }
    if estimates.iter().any(|e| !e.is_finite()) {
        return Err(HurstError::InvalidParameter("estimates must be finite".into()));
    }
    let r = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / r;
    let ss: f64 = estimates.iter().map(|e| (e - mean).powi(2)).sum();
    let mse = estimates.iter().map(|e| (e - h0).powi(2)).sum::<f64>() / r;
    Ok(Metrics {
        mean,
        bias: h0 - mean,
        sigma: (ss / (r - 1.0)).sqrt(),
        mse,
    })
}

/// One sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub estimator: Method,
    pub h0: f64,
    pub log2_n: u32,
    pub replications: usize,
    pub failures: usize,
    /// `None` when fewer than two replications succeeded.
    pub metrics: Option<Metrics>,
    pub label: PrecisionLabel,
}

impl MetricsRow {
    pub fn from_estimates(estimator: Method, h0: f64, log2_n: u32, replications: usize, estimates: &[f64]) -> Self {
        let metrics = compute_metrics(estimates, h0).ok();
        let label = metrics
            .map(|m| classify_precision(m.bias, m.sigma))
            .unwrap_or(PrecisionLabel::Inconclusive);
        Self {
            estimator,
            h0,
            log2_n,
            replications,
            failures: replications - estimates.len(),
            metrics,
            label,
        }
    }

    pub fn n(&self) -> usize {
        1usize << self.log2_n
    }

    /// More than 5% of replications failed.
    pub fn flagged(&self) -> bool {
        self.failures as f64 > FAILURE_FLAG_FRACTION * self.replications as f64
    }

    pub fn meets(&self, target: PrecisionTarget) -> bool {
        !self.flagged() && self.metrics.is_some_and(|m| target.is_met(m.bias, m.sigma))
    }
}

/// Per-replication bookkeeping; `checksum` identifies the series every
/// estimator in the cell received.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub h_index: usize,
    pub n_index: usize,
    pub replication: usize,
    pub seed: u64,
    pub checksum: u64,
    pub failed: Vec<Method>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Ordered by estimator (config order), then H₀, then N.
    pub rows: Vec<MetricsRow>,
    pub replications: Vec<ReplicationRecord>,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `r` in cell `(h_index, n_index)`. Fixed forever.
pub fn replication_seed(base_seed: u64, h_index: usize, n_index: usize, r: usize) -> u64 {
    let packed = ((h_index as u64 & 0xFFFF) << 48)
        | ((n_index as u64 & 0xFFFF) << 32)
        | (r as u64 & 0xFFFF_FFFF);
    splitmix64(splitmix64(base_seed) ^ packed)
}

/// FNV-1a over the IEEE-754 bit patterns of the samples.
pub fn series_checksum(series: &TimeSeries) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for v in series.values() {
        for byte in v.to_bits().to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    hash
}

struct Outcome {
    record: ReplicationRecord,
    estimates: Vec<Option<f64>>,
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let mut generators = Vec::with_capacity(config.h_values.len() * config.log2_n_values.len());
    for &h in &config.h_values {
        for &i in &config.log2_n_values {
            generators.push(FgnGenerator::new(FgnModel::standard(h)?, 1usize << i)?);
        }
    }
    let n_len = config.log2_n_values.len();
    let tasks: Vec<(usize, usize, usize)> = (0..config.h_values.len())
        .flat_map(|hi| (0..n_len).flat_map(move |ni| (0..config.replications).map(move |r| (hi, ni, r))))
        .collect();
    debug!("sweep: {} series, {} estimators", tasks.len(), config.estimators.len());

    let outcomes: Vec<Outcome> = tasks
        .par_iter()
        .map(|&(hi, ni, r)| {
            let seed = replication_seed(config.base_seed, hi, ni, r);
            let series = generators[hi * n_len + ni].generate(seed);
            let checksum = series_checksum(&series);
            let mut failed = Vec::new();
            let estimates = config
                .estimators
                .iter()
                .map(|&method| match config.estimator_config.estimate(&series, method) {
                    Ok(est) => Some(est.h_hat),
                    Err(err) => {
                        trace!("{method} failed on h#{hi} n#{ni} r{r}: {err}");
                        failed.push(method);
                        None
                    }
                })
                .collect();
            trace!("h#{hi} n#{ni} r{r} seed={seed:#018x} checksum={checksum:#018x}");
            Outcome {
                record: ReplicationRecord {
                    h_index: hi,
                    n_index: ni,
                    replication: r,
                    seed,
                    checksum,
                    failed,
                },
                estimates,
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(config.estimators.len() * config.h_values.len() * n_len);
    for (ei, &method) in config.estimators.iter().enumerate() {
        for (hi, &h0) in config.h_values.iter().enumerate() {
            for (ni, &log2_n) in config.log2_n_values.iter().enumerate() {
                let start = (hi * n_len + ni) * config.replications;
                let cell = &outcomes[start..start + config.replications];
                let estimates: Vec<f64> = cell.iter().filter_map(|o| o.estimates[ei]).collect();
                let row = MetricsRow::from_estimates(method, h0, log2_n, config.replications, &estimates);
                if row.flagged() {
                    warn!(
                        "{method} H0={h0} N=2^{log2_n}: {} of {} replications failed",
                        row.failures, row.replications
                    );
                }
                rows.push(row);
            }
        }
    }
    Ok(SweepOutput {
        rows,
        replications: outcomes.into_iter().map(|o| o.record).collect(),
    })
}

/// Runs the sweep on a dedicated pool with `threads` workers.
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<SweepOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HurstError::InvalidParameter(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_sweep(config))
}

/// Smallest N with a passing suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinLengthFinding {
    pub estimator: Method,
    pub n_min: Option<usize>,
    pub criterion: PrecisionTarget,
}

/// Smallest grid N whose cells meet `target` for every H₀, with every
/// larger N in the grid meeting it too.
pub fn determine_min_length(rows: &[MetricsRow], estimator: Method, target: PrecisionTarget) -> MinLengthFinding {
    let mut by_length: BTreeMap<u32, bool> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.estimator == estimator) {
        let passes = by_length.entry(row.log2_n).or_insert(true);
        *passes &= row.meets(target);
    }
    let mut n_min = None;
    for (&log2_n, &passes) in by_length.iter().rev() {
        if !passes {
            break;
        }
        n_min = Some(1usize << log2_n);
    }
    MinLengthFinding {
        estimator,
        n_min,
        criterion: target,
    }
}

pub fn determine_all_min_lengths(rows: &[MetricsRow], target: PrecisionTarget) -> Vec<MinLengthFinding> {
    let mut methods: Vec<Method> = rows.iter().map(|r| r.estimator).collect();
    methods.sort();
    methods.dedup();
    methods
        .into_iter()
        .map(|m| determine_min_length(rows, m, target))
        .collect()
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the metrics table as CSV (LF line endings, empty fields where a
/// row has no metrics).
pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io_err = |e: csv::Error| HurstError::io("<metrics csv>", std::io::Error::other(e));
    w.write_record(METRICS_CSV_HEADER).map_err(io_err)?;
    for row in rows {
        let m = row.metrics;
        w.write_record([
            row.estimator.as_str().to_owned(),
            row.h0.to_string(),
            row.log2_n.to_string(),
            row.replications.to_string(),
            row.failures.to_string(),
            opt_field(m.map(|m| m.mean)),
            opt_field(m.map(|m| m.bias)),
            opt_field(m.map(|m| m.sigma)),
            opt_field(m.map(|m| m.mse)),
            row.label.as_str().to_owned(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| HurstError::io("<metrics csv>", e))
}

pub fn metrics_csv_string(rows: &[MetricsRow]) -> String {
    let mut buf = Vec::new();
    write_metrics_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Parses a metrics CSV written by [`write_metrics_csv`].
pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let bad = |line: u64, message: String| HurstError::Ingest {
        path: "<metrics csv>".into(),
        line,
        message,
    };
    let headers = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if headers.iter().ne(METRICS_CSV_HEADER.iter().copied()) {
        return Err(bad(1, format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| bad(line, format!("column {} is not a number", METRICS_CSV_HEADER[i])))
        };
        let int = |i: usize| -> Result<usize> {
            record[i].parse::<usize>().map_err(|_| bad(line, format!("column {} is not an integer", METRICS_CSV_HEADER[i])))
        };
        let metrics = if record[5].is_empty() {
            None
        } else {
            Some(Metrics {
                mean: num(5)?,
                bias: num(6)?,
                sigma: num(7)?,
                mse: num(8)?,
            })
        };
        rows.push(MetricsRow {
            estimator: record[0].parse()?,
            h0: num(1)?,
            log2_n: int(2)? as u32,
            replications: int(3)?,
            failures: int(4)?,
            metrics,
            label: record[9].parse()?,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct FindingJson {
    n_min: Option<usize>,
    criterion: String,
}

/// `{estimator: {n_min, criterion}}`.
pub fn findings_json(findings: &[MinLengthFinding]) -> String {
    let map: BTreeMap<&str, FindingJson> = findings
        .iter()
        .map(|f| {
            (
                f.estimator.as_str(),
                FindingJson {
                    n_min: f.n_min,
                    criterion: f.criterion.as_str().to_owned(),
                },
            )
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&map).expect("findings serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn metrics_examples() {
        let m = compute_metrics(&[0.8, 0.8, 0.8], 0.8).unwrap();
        assert!(m.bias.abs() < 1e-15 && m.sigma < 1e-15 && m.mse < 1e-30);

        let m = compute_metrics(&[0.77, 0.83], 0.8).unwrap();
        assert!(m.bias.abs() < 1e-12);
        assert!((m.sigma - 0.042_426_406_871_192_85).abs() < 1e-12);
        assert!((m.mse - 0.0009).abs() < 1e-12);

        let m = compute_metrics(&[0.9, 0.9, 0.9], 0.8).unwrap();
        assert!((m.bias + 0.1).abs() < 1e-12);
        assert!(m.sigma < 1e-12);
        assert!((m.mse - 0.01).abs() < 1e-12);

        assert!(matches!(compute_metrics(&[0.5], 0.5), Err(HurstError::InsufficientData(_))));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_precision(0.02, 0.005), PrecisionLabel::HighPrecision);
        assert_eq!(classify_precision(-0.02, 0.005), PrecisionLabel::HighPrecision);
        assert_eq!(classify_precision(0.04, 0.015), PrecisionLabel::Acceptable);
        assert_eq!(classify_precision(0.07, 0.05), PrecisionLabel::Inconclusive);
        assert_eq!(classify_precision(0.2, 0.0), PrecisionLabel::Biased);
        assert_eq!(classify_precision(0.03, 0.01), PrecisionLabel::HighPrecision);
        assert_eq!(classify_precision(0.05, 0.01), PrecisionLabel::Inconclusive);
        assert_eq!(classify_precision(0.01, 0.015), PrecisionLabel::Inconclusive);
    }

    #[test]
    fn targets() {
        assert!(PrecisionTarget::AcceptableOrBetter.is_met(0.01, 0.015));
        assert!(PrecisionTarget::AcceptableOrBetter.is_met(-0.049, 0.02));
        assert!(!PrecisionTarget::AcceptableOrBetter.is_met(0.05, 0.01));
        assert!(!PrecisionTarget::HighPrecision.is_met(0.01, 0.015));
        assert_eq!("acceptable-or-better".parse::<PrecisionTarget>().unwrap(), PrecisionTarget::AcceptableOrBetter);
    }

    #[test]
    fn seeds_are_distinct_and_fixed() {
        let mut seen = std::collections::HashSet::new();
        for hi in 0..5 {
            for ni in 0..11 {
                for r in 0..50 {
                    assert!(seen.insert(replication_seed(7, hi, ni, r)));
                }
            }
        }
        assert_eq!(replication_seed(7, 0, 0, 0), replication_seed(7, 0, 0, 0));
        assert_ne!(replication_seed(7, 0, 0, 0), replication_seed(8, 0, 0, 0));
    }

    fn row(method: Method, h0: f64, log2_n: u32, bias: f64, sigma: f64) -> MetricsRow {
        MetricsRow {
            estimator: method,
            h0,
            log2_n,
            replications: 10,
            failures: 0,
            metrics: Some(Metrics {
                mean: h0 - bias,
                bias,
                sigma,
                mse: bias * bias + sigma * sigma * 0.9,
            }),
            label: classify_precision(bias, sigma),
        }
    }

    #[test]
    fn min_length_examples() {
        let all_pass: Vec<MetricsRow> = (6..=10)
            .flat_map(|i| [0.5, 0.9].map(|h| row(Method::Whittle, h, i, 0.0, 0.005)))
            .collect();
        let f = determine_min_length(&all_pass, Method::Whittle, PrecisionTarget::HighPrecision);
        assert_eq!(f.n_min, Some(64));

        // Passing at 2^7 but failing at 2^8 breaks the suffix.
        let mut rows = all_pass.clone();
        rows[2] = row(Method::Whittle, 0.5, 7, 0.0, 0.005);
        rows[4] = row(Method::Whittle, 0.5, 8, 0.2, 0.005);
        rows[0] = row(Method::Whittle, 0.5, 6, 0.2, 0.005);
        let f = determine_min_length(&rows, Method::Whittle, PrecisionTarget::HighPrecision);
        assert_eq!(f.n_min, Some(512));

        // Failing at the top of the grid means no finding.
        let mut rows = all_pass;
        rows.push(row(Method::Whittle, 0.7, 10, 0.08, 0.005));
        assert_eq!(
            determine_min_length(&rows, Method::Whittle, PrecisionTarget::AcceptableOrBetter).n_min,
            None
        );
        assert_eq!(determine_min_length(&rows, Method::Rs, PrecisionTarget::HighPrecision).n_min, None);
    }

    #[test]
    fn failed_rows_never_meet() {
        let r = MetricsRow::from_estimates(Method::Periodogram, 0.8, 6, 10, &[]);
        assert_eq!(r.failures, 10);
        assert!(r.metrics.is_none() && r.flagged());
        assert_eq!(r.label, PrecisionLabel::Inconclusive);
        assert!(!r.meets(PrecisionTarget::AcceptableOrBetter));
        let r = MetricsRow::from_estimates(Method::Whittle, 0.8, 6, 100, &vec![0.8; 90]);
        assert!(r.flagged() && !r.meets(PrecisionTarget::AcceptableOrBetter));
    }

    #[test]
    fn small_sweep_shape_and_pairing() {
        let config = SweepConfig {
            h_values: vec![0.7],
            log2_n_values: vec![7, 8],
            replications: 3,
            estimators: vec![Method::Whittle],
            base_seed: 1,
            estimator_config: EstimatorConfig::default(),
        };
        let out = run_sweep(&config).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.replications.len(), 6);
        for rec in &out.replications {
            let n = 1usize << config.log2_n_values[rec.n_index];
            let gen = FgnGenerator::new(FgnModel::standard(0.7).unwrap(), n).unwrap();
            assert_eq!(series_checksum(&gen.generate(rec.seed)), rec.checksum);
        }
        let csv = metrics_csv_string(&out.rows);
        assert!(csv.starts_with("estimator,h0,log2_n,replications,failures,mean,bias,sigma,mse,label\n"));
        assert_eq!(read_metrics_csv(csv.as_bytes()).unwrap(), out.rows);
    }

    #[test]
    fn config_validation() {
        let mut c = SweepConfig::quick(1);
        assert!(c.validate().is_ok());
        assert_eq!(SweepConfig::paper_defaults(1).series_count(), 11_000);
        c.replications = 1;
        assert!(c.validate().is_err());
        let mut c = SweepConfig::quick(1);
        c.h_values.push(1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn findings_format() {
        let json = findings_json(&[
            MinLengthFinding { estimator: Method::Whittle, n_min: Some(1024), criterion: PrecisionTarget::AcceptableOrBetter },
            MinLengthFinding { estimator: Method::Rs, n_min: None, criterion: PrecisionTarget::AcceptableOrBetter },
        ]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["whittle"]["n_min"], 1024);
        assert!(v["rs"]["n_min"].is_null());
        assert_eq!(v["rs"]["criterion"], "acceptable_or_better");
    }

    proptest! {
        #[test]
        fn metrics_identity(est in prop::collection::vec(0.0f64..1.5, 2..300), h0 in 0.01f64..0.99) {
            let m = compute_metrics(&est, h0).unwrap();
            let r = est.len() as f64;
            prop_assert!(m.sigma >= 0.0);
            prop_assert!(m.mse >= m.bias * m.bias - 1e-12);
            prop_assert!((m.mse - (m.bias * m.bias + m.sigma * m.sigma * (r - 1.0) / r)).abs() < 1e-12);
        }

        #[test]
        fn labels_are_total_and_consistent(bias in -1.0f64..1.0, sigma in 0.0f64..1.0) {
            let label = classify_precision(bias, sigma);
            let b = bias.abs();
            match label {
                PrecisionLabel::HighPrecision => prop_assert!(b <= 0.03 && sigma <= 0.01),
                PrecisionLabel::Acceptable => prop_assert!(b > 0.03 && b < 0.05 && sigma <= 0.02),
                PrecisionLabel::Biased => prop_assert!(b > 0.1),
                PrecisionLabel::Inconclusive => {}
            }
        }

        #[test]
        fn min_length_suffix_rule(pass in prop::collection::vec(prop::collection::vec(any::<bool>(), 3), 1..11)) {
            let rows: Vec<MetricsRow> = pass.iter().enumerate().flat_map(|(i, hs)| {
                hs.iter().enumerate().map(move |(k, &ok)| {
                    row(Method::AbryVeitch, 0.5 + 0.1 * k as f64, 6 + i as u32, if ok { 0.0 } else { 0.2 }, 0.001)
                })
            }).collect();
            let f = determine_min_length(&rows, Method::AbryVeitch, PrecisionTarget::HighPrecision);
            if let Some(n_min) = f.n_min {
                for r in rows.iter().filter(|r| r.n() >= n_min) {
                    prop_assert!(r.meets(PrecisionTarget::HighPrecision));
                }
                let below = n_min.trailing_zeros();
                if below > 6 {
                    prop_assert!(rows.iter().filter(|r| r.log2_n == below - 1).any(|r| !r.meets(PrecisionTarget::HighPrecision)));
                }
            } else {
                prop_assert!(rows.iter().filter(|r| r.log2_n == 5 + pass.len() as u32).any(|r| !r.meets(PrecisionTarget::HighPrecision)));
            }
        }
    }
}
