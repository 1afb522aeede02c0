// SPDX-License-Identifier: MIT OR Apache-2.0

use lrd_cp::fgn::{
    build_sampler, fbm_from_increments, fgn_autocovariance, sample_fbm_grid, sample_fgn,
    FgnParams,
};
use lrd_cp::rng::stream_rng;
use rayon::prelude::*;

fn sampler(hurst: f64, n: usize) -> lrd_cp::fgn::FgnSampler {
    build_sampler(FgnParams::new(hurst, n).unwrap()).unwrap()
}

#[test]
fn white_noise_moments() {
    let n = 100_000;
    let x = sample_fgn(&sampler(0.5, n), 17);
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() < 0.02, "var {var}");
}

#[test]
fn lag_one_autocovariance_long_memory() {
    let n = 100_000;
    let x = sample_fgn(&sampler(0.8, n), 5);
    // known zero mean, so no centering
    let lag1 = (0..n - 1).map(|i| x[i] * x[i + 1]).sum::<f64>() / (n - 1) as f64;
    let exact = fgn_autocovariance(0.8, 1).unwrap();
    assert!((exact - 0.515717).abs() < 1e-6);
    assert!((lag1 - exact).abs() < 0.02, "{lag1} vs {exact}");
}

#[test]
fn exact_covariance_across_lags() {
    // Every lag of a short series, estimated over independent paths with a
    // 3-sigma band from the path-to-path spread.
    let hurst = 0.75;
    let n = 16;
    let paths = 20_000;
    let s = sampler(hurst, n);
    let samples: Vec<Vec<f64>> = (0..paths as u64)
        .into_par_iter()
        .map(|r| s.sample_with(&mut stream_rng(3, r, 0)))
        .collect();
    for lag in 0..n {
        let products: Vec<f64> = samples.iter().map(|x| x[0] * x[lag]).collect();
        let mean = products.iter().sum::<f64>() / paths as f64;
        let var = products.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (paths - 1) as f64;
        let se = (var / paths as f64).sqrt();
        let exact = fgn_autocovariance(hurst, lag).unwrap();
        assert!(
            (mean - exact).abs() < 3.0 * se,
            "lag {lag}: {mean} vs {exact} (se {se})"
        );
    }
}

#[test]
fn fbm_endpoint_is_standard_normal() {
    let grid = 10_000;
    let paths = 10_000;
    let s = sampler(0.5, grid);
    let ends: Vec<f64> = (0..paths as u64)
        .into_par_iter()
        .map(|r| {
            let path = fbm_from_increments(0.5, &s.sample_with(&mut stream_rng(11, r, 0)));
            path[grid - 1]
        })
        .collect();
    let var = ends.iter().map(|v| v * v).sum::<f64>() / paths as f64;
    assert!((var - 1.0).abs() < 0.05, "Var B(1) = {var}");
}

#[test]
fn fbm_self_similarity() {
    let hurst = 0.7;
    let grid = 1000;
    let paths = 10_000;
    let s = sampler(hurst, grid);
    let second_moment = (0..paths as u64)
        .into_par_iter()
        .map(|r| {
            let path = fbm_from_increments(hurst, &s.sample_with(&mut stream_rng(12, r, 0)));
            path[grid / 2 - 1].powi(2)
        })
        .sum::<f64>()
        / paths as f64;
    let expected = 0.5f64.powf(2.0 * hurst);
    assert!((expected - 0.379).abs() < 1e-3);
    assert!((second_moment - expected).abs() < 0.02, "{second_moment}");
}

#[test]
fn fbm_grid_endpoint_definition() {
    let hurst = 0.83;
    let n = 500;
    let noise = sample_fgn(&sampler(hurst, n), 21);
    let path = sample_fbm_grid(hurst, n, 21).unwrap();
    assert_eq!(path.len(), n);
    let mut acc = 0.0;
    for (i, x) in noise.iter().enumerate() {
        acc += x;
        let rescaled = path[i] * (n as f64).powf(hurst);
        assert!((rescaled - acc).abs() <= 1e-12 * (1.0 + acc.abs()) * n as f64);
    }
}

#[test]
fn sampler_is_shareable_and_deterministic() {
    let s = sampler(0.9, 777);
    let serial: Vec<Vec<f64>> = (0..16u64).map(|seed| s.sample(seed)).collect();
    let parallel: Vec<Vec<f64>> = (0..16u64).into_par_iter().map(|seed| s.sample(seed)).collect();
    assert_eq!(serial, parallel);
    assert_eq!(s.half_size(), 1024);
}
