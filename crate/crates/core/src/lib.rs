//! Fractional Gaussian noise synthesis, Hurst exponent estimation and the
//! Monte-Carlo methodology for choosing a minimum series length per
//! estimator, plus the windowed analysis applied to packet-capture traces.
//!
//! ```no_run
//! use hurst_core::{estimate, FgnGenerator, FgnModel, Method};
//!
//! let gen = FgnGenerator::new(FgnModel::standard(0.8)?, 4096)?;
//! let series = gen.generate(42);
//! let est = estimate(&series, Method::Whittle)?;
//! println!("H = {:.3}", est.h_hat);
//! # Ok::<(), hurst_core::HurstError>(())
//! ```

pub mod error;
pub mod estimators;
pub mod experiment;
pub mod model;
pub mod regression;
pub mod series_io;
pub mod synthesis;
pub mod trace;

pub use error::{HurstError, Result};
pub use estimators::{estimate, EstimatorConfig, HurstEstimate, Method};
pub use experiment::{
    classify_precision, compute_metrics, determine_min_length, run_sweep, MetricsRow,
    MinLengthFinding, PrecisionLabel, PrecisionTarget, SweepConfig, SweepOutput,
};
pub use model::{
    aggregate_blocks, empirical_autocovariance, fgn_autocovariance, fgn_spectral_density,
    AutocovarianceCurve, FgnModel, TimeSeries,
};
pub use synthesis::{circulant_eigenvalues, generate_fgn, FgnGenerator, GeneratorSpec};
pub use trace::{
    convergence_profile, disaggregate_phases, ingest_capture_csv, sliding_scan, PhaseSet,
    ScanPlan, ScanPoint,
};
