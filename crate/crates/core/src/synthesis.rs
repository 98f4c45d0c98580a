//! Exact fractional Gaussian noise by circulant embedding (Davies–Harte).
//!
//! The autocovariance row `[ρ(0), …, ρ(L/2), ρ(L/2−1), …, ρ(1)]` of length
//! `L` (the smallest power of two `≥ 2n`) defines a circulant matrix whose
//! eigenvalues are the DFT of that row. With `V` a Hermitian-symmetric
//! vector of unit complex normals built from exactly `L` real variates,
//! `X_t = L^{-1/2} Σ_k √λ_k V_k e^{2πitk/L}` is real and has covariance
//! `ρ(|t−s|)`; the first `n` entries are returned.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{HurstError, Result};
use crate::model::{fgn_autocovariance, FgnModel, TimeSeries};

/// Eigenvalues below `-EIGEN_TOLERANCE · ρ(0)` signal an invalid embedding.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

/// What to generate: model, length and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub model: FgnModel,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: FgnModel, n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(HurstError::InvalidParameter(format!(
                "series length must be at least 2, got {n}"
            )));
        }
        Ok(Self { model, n, seed })
    }

    pub fn embedding_size(&self) -> usize {
        embedding_size(self.n)
    }
}

/// Smallest power of two that is at least `2n`.
pub fn embedding_size(n: usize) -> usize {
    (2 * n).next_power_of_two()
}

fn embedding_row(model: &FgnModel, size: usize) -> Vec<f64> {
    let half = size / 2;
    (0..size)
        .map(|j| fgn_autocovariance(model, if j <= half { j } else { size - j }))
        .collect()
}

/// DFT of the circulant embedding's first row, for series length `n`.
pub fn circulant_eigenvalues(model: &FgnModel, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(HurstError::InvalidParameter(format!(
            "series length must be at least 2, got {n}"
        )));
    }
    let size = embedding_size(n);
    let mut buf: Vec<Complex64> = embedding_row(model, size)
        .into_iter()
        .map(|r| Complex64::new(r, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(size).process(&mut buf);

    let floor = -EIGEN_TOLERANCE * model.sigma2();
    let mut eigen = Vec::with_capacity(size);
    for (index, c) in buf.iter().enumerate() {
        if c.re < floor {
            return Err(HurstError::EmbeddingFailure { index, value: c.re });
        }
        eigen.push(c.re);
    }
    Ok(eigen)
}

/// Reusable generator for one `(model, n)` pair; the embedding spectrum and
/// FFT plan are computed once and shared across seeds and threads.
#[derive(Clone)]
pub struct FgnGenerator {
    model: FgnModel,
    n: usize,
    /// `√(λ_k / L)`, with negative round-off clamped to zero.
    amplitudes: Arc<[f64]>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnGenerator")
            .field("model", &self.model)
            .field("n", &self.n)
            .field("embedding_size", &self.amplitudes.len())
            .finish()
    }
}

impl FgnGenerator {
    pub fn new(model: FgnModel, n: usize) -> Result<Self> {
        let eigen = circulant_eigenvalues(&model, n)?;
        let size = eigen.len() as f64;
        let amplitudes: Arc<[f64]> = eigen.iter().map(|&l| (l.max(0.0) / size).sqrt()).collect();
        let fft = FftPlanner::new().plan_fft_inverse(eigen.len());
        Ok(Self {
            model,
            n,
            amplitudes,
            fft,
        })
    }

    pub fn model(&self) -> FgnModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn embedding_size(&self) -> usize {
        self.amplitudes.len()
    }

    /// Draws one sample path. Consumes exactly `L` standard normals from a
    /// ChaCha12 stream keyed by `seed`, in index order.
    pub fn generate(&self, seed: u64) -> TimeSeries {
        let size = self.amplitudes.len();
        let half = size / 2;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        buf[0] = Complex64::new(self.amplitudes[0] * normal(), 0.0);
        buf[half] = Complex64::new(self.amplitudes[half] * normal(), 0.0);
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        for k in 1..half {
            let re = normal();
            let im = normal();
            let v = Complex64::new(re, im) * (scale * self.amplitudes[k]);
            buf[k] = v;
            buf[size - k] = v.conj();
        }
        self.fft.process(&mut buf);

        let values = buf[..self.n].iter().map(|c| c.re).collect();
        TimeSeries::new(values).expect("synthesized samples are finite")
    }
}

/// One-shot generation for a [`GeneratorSpec`].
pub fn generate_fgn(spec: &GeneratorSpec) -> Result<TimeSeries> {
    Ok(FgnGenerator::new(spec.model, spec.n)?.generate(spec.seed))
}
