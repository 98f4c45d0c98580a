//! `hurst`: generate fGn, estimate Hurst exponents, run Monte-Carlo sweeps and
//! analyse binned packet captures.

mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hurst_core::experiment::{
    self, determine_all_min_lengths, findings_json, metrics_csv_string, read_metrics_csv,
};
use hurst_core::series_io::{format_series, read_series};
use hurst_core::trace::{self, BinMode};
use hurst_core::{
    classify_precision, EstimatorConfig, FgnModel, GeneratorSpec, HurstEstimate, Method,
    PrecisionTarget, ScanPlan,
};

use config::{parse_exponents, parse_list, parse_methods, parse_wavelet, Preset, SweepSettings};
use error::{CliError, CliResult};
use output::{write_stdout, Outputs, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "hurst", version, about = "Hurst exponent estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize fractional Gaussian noise into a series file.
    Generate(GenerateArgs),
    /// Estimate H of one series with one or more methods (JSON output).
    Estimate(EstimateArgs),
    /// Monte-Carlo sweep over (estimator, H0, N): metrics CSV and findings JSON.
    Sweep(SweepArgs),
    /// Label a (bias, sigma) pair or every row of a metrics CSV.
    Classify(ClassifyArgs),
    /// Sliding-window H estimates over a series.
    Scan(ScanArgs),
    /// Bin a `timestamp,frame_bytes` capture CSV into a series file.
    Ingest(IngestArgs),
    /// Phase-disaggregated convergence profile.
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    h: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Estimator name, repeatable or comma-separated; `all` selects every one.
    #[arg(long = "method", default_value = "whittle")]
    methods: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Debug, Args, Default)]
struct TuningArgs {
    #[arg(long)]
    whittle_truncation: Option<usize>,
    #[arg(long)]
    av_j1: Option<u32>,
    #[arg(long)]
    av_j2: Option<u32>,
    #[arg(long)]
    wavelet: Option<String>,
    #[arg(long)]
    lowfreq_fraction: Option<f64>,
    #[arg(long)]
    rs_min_block: Option<usize>,
}

impl TuningArgs {
    fn config(&self) -> CliResult<EstimatorConfig> {
        let mut c = EstimatorConfig::default();
        if let Some(v) = self.whittle_truncation {
            c.whittle_truncation = v;
        }
        c.av_j1 = self.av_j1.or(c.av_j1);
        c.av_j2 = self.av_j2.or(c.av_j2);
        if let Some(w) = &self.wavelet {
            c.wavelet = parse_wavelet(w)?;
        }
        if let Some(v) = self.lowfreq_fraction {
            c.lowfreq_fraction = v;
        }
        if let Some(v) = self.rs_min_block {
            c.rs_min_block = v;
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// H0 ∈ {0.5..0.9}, N = 2^6..2^16, R = 200, all estimators.
    #[arg(long, conflicts_with = "quick")]
    paper_defaults: bool,
    /// R = 20, N = 2^6..2^13.
    #[arg(long)]
    quick: bool,
    /// Flat key = value file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Comma-separated nominal H values.
    #[arg(long)]
    h: Option<String>,
    /// Exponents i of N = 2^i, e.g. `6..=16` or `8,10,12`.
    #[arg(long)]
    log2_n: Option<String>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    estimators: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// Minimum-length criterion: `acceptable_or_better` or `high_precision`.
    #[arg(long)]
    target: Option<String>,
    /// Metrics CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Findings JSON with the minimum length per estimator.
    #[arg(long)]
    findings: Option<PathBuf>,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long, requires = "sigma", conflicts_with = "metrics", allow_hyphen_values = true)]
    bias: Option<f64>,
    #[arg(long, requires = "bias")]
    sigma: Option<f64>,
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = trace::DEFAULT_WINDOW)]
    window: usize,
    /// Defaults to half a window.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, default_value = "whittle")]
    method: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CountMode {
    Bytes,
    Packets,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Bin width in seconds.
    #[arg(long, default_value_t = trace::DEFAULT_BIN_WIDTH)]
    bin_width: f64,
    #[arg(long, value_enum, default_value = "bytes")]
    count: CountMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "whittle")]
    method: String,
    /// Comma-separated disaggregation factors; powers of two up to 64 that
    /// leave at least 4 samples per phase when omitted.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(s: &str) -> CliResult<Method> {
    s.parse().map_err(|e: hurst_core::HurstError| CliError::Usage(e.to_string()))
}

/// Routes data either to a file (with manifest) or to standard output.
fn emit(out: Option<&Path>, manifest: RunManifest, bytes: Vec<u8>) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut outputs = Outputs::new(manifest);
            outputs.add(path, bytes);
            outputs.commit()
        }
        None => write_stdout(&bytes),
    }
}

fn run_generate(args: GenerateArgs) -> CliResult<()> {
    let model = FgnModel::new(args.h, args.sigma2)?;
    let spec = GeneratorSpec::new(model, args.n, args.seed)?;
    let series = hurst_core::generate_fgn(&spec)?;
    let manifest = RunManifest::new("generate").seed(args.seed);
    let mut meta = vec![
        ("generator".to_owned(), "davies-harte".to_owned()),
        ("h".to_owned(), args.h.to_string()),
        ("sigma2".to_owned(), args.sigma2.to_string()),
        ("n".to_owned(), args.n.to_string()),
        ("seed".to_owned(), args.seed.to_string()),
    ];
    meta.extend(manifest.header_pairs());
    let text = format_series(&series, &meta).into_bytes();
    match args.out {
        Some(path) => {
            let mut outputs = Outputs::new(manifest);
            outputs.add_self_describing(&path, text);
            outputs.commit()
        }
        None => write_stdout(&text),
    }
}

#[derive(Serialize)]
struct EstimateReport<'a> {
    input: String,
    n: usize,
    estimates: &'a [HurstEstimate],
}

fn run_estimate(args: EstimateArgs) -> CliResult<()> {
    let config = args.tuning.config()?;
    let mut methods = Vec::new();
    for m in &args.methods {
        for method in parse_methods(m)? {
            if !methods.contains(&method) {
                methods.push(method);
            }
        }
    }
    let file = read_series(&args.input)?;
    let estimates = methods
        .iter()
        .map(|&m| config.estimate(&file.series, m))
        .collect::<Result<Vec<_>, _>>()?;
    for e in &estimates {
        for w in &e.warnings {
            log::warn!("{}: {w}", e.method);
        }
    }
    let report = EstimateReport {
        input: args.input.display().to_string(),
        n: file.series.len(),
        estimates: &estimates,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    let manifest = RunManifest::new("estimate").input(&args.input)?;
    emit(args.out.as_deref(), manifest, json.into_bytes())
}

fn run_sweep(args: SweepArgs) -> CliResult<()> {
    let file_settings = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            SweepSettings::parse(&text, path)?
        }
        None => SweepSettings::default(),
    };
    let flag_settings = SweepSettings {
        preset: if args.quick {
            Some(Preset::Quick)
        } else if args.paper_defaults {
            Some(Preset::PaperDefaults)
        } else {
            None
        },
        h_values: args.h.as_deref().map(parse_list).transpose()?,
        log2_n_values: args.log2_n.as_deref().map(parse_exponents).transpose()?,
        replications: args.replications,
        estimators: args.estimators.as_deref().map(parse_methods).transpose()?,
        base_seed: args.base_seed,
        threads: args.threads,
        target: args
            .target
            .as_deref()
            .map(|t| t.parse().map_err(|e: hurst_core::HurstError| CliError::Usage(e.to_string())))
            .transpose()?,
        whittle_truncation: args.tuning.whittle_truncation,
        av_j1: args.tuning.av_j1,
        av_j2: args.tuning.av_j2,
        wavelet: args.tuning.wavelet.as_deref().map(parse_wavelet).transpose()?,
        lowfreq_fraction: args.tuning.lowfreq_fraction,
        rs_min_block: args.tuning.rs_min_block,
    };
    let settings = file_settings.overlay(flag_settings);
    let config = settings.to_config()?;
    let target = settings.target.unwrap_or(PrecisionTarget::AcceptableOrBetter);
    log::info!(
        "sweep: {} series, {} estimators, base seed {}",
        config.series_count(),
        config.estimators.len(),
        config.base_seed
    );
    let output = match settings.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(k) => experiment::run_sweep_with_threads(&config, k)?,
        None => experiment::run_sweep(&config)?,
    };
    let csv = metrics_csv_string(&output.rows).into_bytes();
    let findings = findings_json(&determine_all_min_lengths(&output.rows, target)).into_bytes();

    let mut manifest = RunManifest::new("sweep").seed(config.base_seed);
    if let Some(path) = &args.config {
        manifest = manifest.input(path)?;
    }
    if args.out.is_none() {
        write_stdout(&csv)?;
    }
    if args.out.is_none() && args.findings.is_none() {
        return Ok(());
    }
    let mut outputs = Outputs::new(manifest);
    if let Some(p) = &args.out {
        outputs.add(p, csv);
    }
    if let Some(p) = &args.findings {
        outputs.add(p, findings);
    }
    outputs.commit()
}

fn run_classify(args: ClassifyArgs) -> CliResult<()> {
    match (args.bias, args.sigma, &args.metrics) {
        (Some(bias), Some(sigma), None) => {
            if !(sigma >= 0.0) || !bias.is_finite() {
                return Err(CliError::Usage("sigma must be non-negative and bias finite".into()));
            }
            write_stdout(format!("{}\n", classify_precision(bias, sigma)).as_bytes())
        }
        (None, None, Some(path)) => {
            let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
            let rows = read_metrics_csv(file)?;
            let mut out = String::from("estimator,h0,log2_n,bias,sigma,label\n");
            for r in &rows {
                let (bias, sigma, label) = match &r.metrics {
                    Some(m) => (
                        m.bias.to_string(),
                        m.sigma.to_string(),
                        classify_precision(m.bias, m.sigma).to_string(),
                    ),
                    None => (String::new(), String::new(), "inconclusive".to_owned()),
                };
                out.push_str(&format!("{},{},{},{bias},{sigma},{label}\n", r.estimator, r.h0, r.log2_n));
            }
            write_stdout(out.as_bytes())
        }
        _ => Err(CliError::Usage("classify needs either --bias and --sigma, or --metrics".into())),
    }
}

fn run_scan(args: ScanArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    let plan = ScanPlan::new(args.window, args.stride.unwrap_or(args.window / 2), method)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let file = read_series(&args.input)?;
    let points = trace::sliding_scan(&file.series, &plan)?;
    let gaps = points.iter().filter(|p| p.h_e.is_none()).count();
    if gaps > 0 {
        log::warn!("{gaps} of {} windows could not be estimated", points.len());
    }
    let mut buf = Vec::new();
    trace::write_scan_csv(&file.series, &plan, &points, &mut buf)?;
    let manifest = RunManifest::new("scan").input(&args.input)?;
    emit(args.out.as_deref(), manifest, buf)
}

fn run_ingest(args: IngestArgs) -> CliResult<()> {
    let mode = match args.count {
        CountMode::Bytes => BinMode::Bytes,
        CountMode::Packets => BinMode::Packets,
    };
    if !(args.bin_width > 0.0 && args.bin_width.is_finite()) {
        return Err(CliError::Usage(format!("--bin-width must be positive, got {}", args.bin_width)));
    }
    let series = trace::ingest_capture_csv_with(&args.input, args.bin_width, mode)?;
    let manifest = RunManifest::new("ingest").input(&args.input)?;
    let mut meta = vec![
        ("source".to_owned(), "capture".to_owned()),
        ("bin_width".to_owned(), args.bin_width.to_string()),
        (
            "count".to_owned(),
            match mode {
                BinMode::Bytes => "bytes",
                BinMode::Packets => "packets",
            }
            .to_owned(),
        ),
    ];
    meta.extend(manifest.header_pairs());
    log::info!("{} bins of {} s", series.len(), args.bin_width);
    let text = format_series(&series, &meta).into_bytes();
    match args.out {
        Some(path) => {
            let mut outputs = Outputs::new(manifest);
            outputs.add_self_describing(&path, text);
            outputs.commit()
        }
        None => write_stdout(&text),
    }
}

fn run_profile(args: ProfileArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    let file = read_series(&args.input)?;
    let m_values: Vec<usize> = match &args.m {
        Some(list) => parse_list(list)?,
        None => (0..=6)
            .map(|k| 1usize << k)
            .filter(|&m| m <= file.series.len() / 4)
            .collect(),
    };
    if m_values.is_empty() {
        return Err(CliError::Usage("series too short for any disaggregation factor".into()));
    }
    let rows = trace::convergence_profile(&file.series, method, &m_values)?;
    let mut buf = Vec::new();
    trace::write_profile_csv(&rows, &mut buf)?;
    let manifest = RunManifest::new("profile").input(&args.input)?;
    emit(args.out.as_deref(), manifest, buf)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => run_generate(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Classify(a) => run_classify(a),
        Command::Scan(a) => run_scan(a),
        Command::Ingest(a) => run_ingest(a),
        Command::Profile(a) => run_profile(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
