// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact fractional Gaussian noise via circulant embedding (Davies–Harte).
//!
//! The covariance `γ(0), …, γ(n-1)` of unit-variance fGn is embedded in a
//! symmetric circulant matrix of size `2M`, `M` the next power of two at or
//! above `n`. Its eigenvalues are the DFT of the first row; a complex Gaussian
//! vector scaled by their square roots and pushed through one FFT has real
//! part distributed exactly as the first `n` fGn values.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, STREAM_DATA};

/// Relative eigenvalue tolerance: anything above `-EIG_TOL * max` is clamped to zero.
pub const EIG_TOL: f64 = 1e-8;
/// How many times the embedding is doubled before giving up.
pub const MAX_DOUBLINGS: u32 = 4;

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidHurst {
            value: hurst,
            range: "(0, 1)",
        })
    }
}

/// Autocovariance of unit-variance fGn at `lag`:
/// `γ(k) = ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(autocov_unchecked(hurst, lag))
}

fn autocov_unchecked(hurst: f64, lag: usize) -> f64 {
    if lag == 0 {
        return 1.0;
    }
    let two_h = 2.0 * hurst;
    let k = lag as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgnParams {
    hurst: f64,
    length: usize,
}

impl FgnParams {
    pub fn new(hurst: f64, length: usize) -> Result<Self> {
        check_hurst(hurst)?;
        if length < 2 {
            return Err(Error::TooShort {
                min: 2,
                got: length,
            });
        }
        Ok(Self { hurst, length })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn length(&self) -> usize {
        self.length
    }
}

/// Precomputed spectral weights and FFT plan for one `(H, n)` pair.
///
/// Immutable after construction; sampling takes `&self` so one sampler can
/// serve many threads.
#[derive(Clone)]
pub struct FgnSampler {
    params: FgnParams,
    half_size: usize,
    spectral_weights: Vec<f64>,
    // sqrt(λ_j / 2M), applied to the complex Gaussian input.
    amplitudes: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FgnSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FgnSampler")
            .field("params", &self.params)
            .field("embedding_size", &self.embedding_size())
            .finish_non_exhaustive()
    }
}

pub fn build_sampler(params: FgnParams) -> Result<FgnSampler> {
    FgnSampler::new(params)
}

pub fn sample_fgn(sampler: &FgnSampler, seed: u64) -> Vec<f64> {
    sampler.sample(seed)
}

impl FgnSampler {
    pub fn new(params: FgnParams) -> Result<Self> {
        let hurst = params.hurst;
        let (half_size, spectral_weights) =
            circulant_eigenvalues(|lag| autocov_unchecked(hurst, lag), params.length)?;
        let size = spectral_weights.len();
        let amplitudes = spectral_weights
            .iter()
            .map(|&w| (w / size as f64).sqrt())
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        Ok(Self {
            params,
            half_size,
            spectral_weights,
            amplitudes,
            fft,
        })
    }

    pub fn params(&self) -> FgnParams {
        self.params
    }

    /// `M` in the embedding of size `2M`.
    pub fn half_size(&self) -> usize {
        self.half_size
    }

    /// Size `2M` of the circulant embedding.
    pub fn embedding_size(&self) -> usize {
        self.spectral_weights.len()
    }

    /// Clamped eigenvalues of the circulant embedding, in DFT order.
    pub fn spectral_weights(&self) -> &[f64] {
        &self.spectral_weights
    }

    /// One fGn path keyed by a 64-bit seed.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        self.sample_with(&mut stream_rng(seed, 0, STREAM_DATA))
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buffer = Vec::new();
        let mut out = Vec::with_capacity(self.params.length);
        self.sample_into(rng, &mut buffer, &mut out);
        out
    }

    /// Fills `out` with a fresh path, reusing `buffer` as FFT workspace.
    pub fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        buffer: &mut Vec<Complex<f64>>,
        out: &mut Vec<f64>,
    ) {
        buffer.clear();
        buffer.extend(self.amplitudes.iter().map(|&a| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(a * re, a * im)
        }));
        self.fft.process(buffer);
        out.clear();
        out.extend(buffer[..self.params.length].iter().map(|z| z.re));
    }
}

/// Eigenvalues of the circulant embedding of `autocov` for a series of
/// `length` values. Returns `M` and the `2M` clamped eigenvalues.
///
/// The embedding doubles up to [`MAX_DOUBLINGS`] times while an eigenvalue
/// sits below `-EIG_TOL * max`.
pub(crate) fn circulant_eigenvalues<F>(autocov: F, length: usize) -> Result<(usize, Vec<f64>)>
where
    F: Fn(usize) -> f64,
{
    let mut half = length.max(1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let mut attempt = 0;
    loop {
        let size = 2 * half;
        let mut row: Vec<Complex<f64>> = (0..size)
            .map(|j| {
                let lag = if j <= half { j } else { size - j };
                Complex::new(autocov(lag), 0.0)
            })
            .collect();
        planner.plan_fft_forward(size).process(&mut row);
        let mut weights: Vec<f64> = row.iter().map(|z| z.re).collect();

        let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = EIG_TOL * max.abs();
        if min >= -tol {
            for w in &mut weights {
                *w = w.max(0.0);
            }
            return Ok((half, weights));
        }
        if attempt == MAX_DOUBLINGS {
            return Err(Error::Embedding {
                min_eigenvalue: min,
                embedding_size: size,
            });
        }
        attempt += 1;
        half *= 2;
    }
}

/// Fractional Brownian motion on `{i / grid_size : i = 1..grid_size}`.
///
/// Computed as `grid_size^{-H}` times the running sum of a fGn sample of
/// the same length; `B_H(0) = 0` is not included.
pub fn sample_fbm_grid(hurst: f64, grid_size: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = build_sampler(FgnParams::new(hurst, grid_size)?)?;
    Ok(fbm_from_increments(hurst, &sampler.sample(seed)))
}

/// Scaled running sum `n^{-H} Σ_{j≤i} ξ_j` of a fGn sample of length `n`.
pub fn fbm_from_increments(hurst: f64, increments: &[f64]) -> Vec<f64> {
    let scale = (increments.len() as f64).powf(-hurst);
    let mut acc = 0.0;
    increments
        .iter()
        .map(|x| {
            acc += x;
            acc * scale
        })
        .collect()
}
