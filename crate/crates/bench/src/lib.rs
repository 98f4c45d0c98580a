//! Shared inputs for the criterion benchmarks under `benches/`.

use hurst_core::{FgnGenerator, FgnModel, TimeSeries};

pub const BENCH_SEED: u64 = 0x5eed;

/// Unit-variance fGn sample of length `2^log2_n`.
pub fn fixture(h: f64, log2_n: u32) -> TimeSeries {
    let model = FgnModel::new(h, 1.0).expect("valid h");
    FgnGenerator::new(model, 1 << log2_n)
        .expect("valid length")
        .generate(BENCH_SEED)
}
