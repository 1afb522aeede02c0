// SPDX-License-Identifier: MIT OR Apache-2.0

//! Self-normalized Wilcoxon statistic `G_n(k)` and its trimmed supremum `T_n`.
//!
//! ```text
//! G_n(k) = |d[k]| / sqrt( (1/n) [ Σ_{t≤k} S_t(1,k)² + Σ_{t>k} S_t(k+1,n)² ] )
//! ```
//!
//! evaluated in O(1) per `k` from the prefix moments of the rank profile.
//! The same machinery over raw values gives the self-normalized CUSUM test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rankstat::{CusumProfile, RankProfile, TimeSeries};

/// Relative scale of the degenerate-denominator threshold.
pub const DEN_TOL: f64 = 1e-12;

/// Trimming fractions `0 < τ1 < τ2 < 1` of the change-point search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestWindow {
    tau1: f64,
    tau2: f64,
}

impl Default for TestWindow {
    fn default() -> Self {
        Self {
            tau1: 0.15,
            tau2: 0.85,
        }
    }
}

impl TestWindow {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        if tau1 > 0.0 && tau1 < tau2 && tau2 < 1.0 {
            Ok(Self { tau1, tau2 })
        } else {
            Err(Error::InvalidWindow { tau1, tau2 })
        }
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    /// Integer split points `⌊nτ1⌋..=⌊nτ2⌋`, restricted to `1..=n-1`.
    pub fn index_range(&self, n: usize) -> Result<(usize, usize)> {
        let lo = ((n as f64) * self.tau1).floor() as usize;
        let hi = ((n as f64) * self.tau2).floor() as usize;
        if lo < 1 || hi > n.saturating_sub(1) || lo > hi {
            return Err(Error::WindowTooNarrow {
                n,
                tau1: self.tau1,
                tau2: self.tau2,
            });
        }
        Ok((lo, hi))
    }
}

/// Outcome of one self-normalized test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub n: usize,
    /// `T_n`, the maximum of `profile`.
    pub statistic: f64,
    /// Smallest `k` attaining the maximum.
    pub argmax_k: usize,
    /// First `k` of the window; `profile[i]` is `G_n(first_k + i)`.
    pub first_k: usize,
    pub profile: Vec<f64>,
    pub critical_value: Option<f64>,
    pub reject: Option<bool>,
    pub tie_flag: bool,
    /// Set when some `k` in the window hit the degenerate-denominator rule.
    pub degenerate: bool,
}

impl TestResult {
    /// Attaches a critical value; rejects when the statistic exceeds it.
    pub fn with_critical_value(mut self, critical_value: f64) -> Self {
        self.critical_value = Some(critical_value);
        self.reject = Some(self.statistic > critical_value);
        self
    }

    pub fn last_k(&self) -> usize {
        self.first_k + self.profile.len() - 1
    }
}

/// `numerator / sqrt(den_sum / n)` with the degenerate-denominator rule,
/// both inputs expressed in units of `unit`. Returns `(value, degenerate)`.
///
/// The rule fires when `den_sum < DEN_TOL·n·(1 + numerator²)`; the result is
/// then 0 for a vanishing numerator and +∞ otherwise. Rank profiles use
/// `unit = 1`, where a nonzero numerator is at least ¼.
fn ratio(numerator: f64, den_sum: f64, n: usize, unit: f64) -> (f64, bool) {
    let num = numerator / unit;
    let den = den_sum / (unit * unit);
    let tol = DEN_TOL * n as f64 * (1.0 + num * num);
    if den < tol {
        let value = if num > DEN_TOL { f64::INFINITY } else { 0.0 };
        (value, true)
    } else {
        (num / (den / n as f64).sqrt(), false)
    }
}

fn self_normalized(cusum: &CusumProfile, k: usize) -> (f64, bool) {
    ratio(
        cusum.d()[k].abs(),
        cusum.normalizer_sum(k),
        cusum.len(),
        cusum.unit(),
    )
}

/// `G_n(k)` for `1 ≤ k ≤ n−1`.
pub fn gn_statistic(profile: &RankProfile, k: usize) -> f64 {
    assert!(
        k >= 1 && k < profile.len(),
        "k = {k} outside 1..n-1 for n = {}",
        profile.len()
    );
    self_normalized(profile.cusum(), k).0
}

/// Scans `G(k)` over the window of a profile built from any values.
pub fn scan_window(
    cusum: &CusumProfile,
    window: &TestWindow,
    tie_flag: bool,
) -> Result<TestResult> {
    let n = cusum.len();
    let (lo, hi) = window.index_range(n)?;
    let mut profile = Vec::with_capacity(hi - lo + 1);
    let mut degenerate = false;
    let mut best = (f64::NEG_INFINITY, lo);
    for k in lo..=hi {
        let (g, degen) = self_normalized(cusum, k);
        degenerate |= degen;
        if g > best.0 {
            best = (g, k);
        }
        profile.push(g);
    }
    Ok(TestResult {
        n,
        statistic: best.0,
        argmax_k: best.1,
        first_k: lo,
        profile,
        critical_value: None,
        reject: None,
        tie_flag,
        degenerate,
    })
}

/// `T_n(τ1, τ2) = max_{⌊nτ1⌋ ≤ k ≤ ⌊nτ2⌋} G_n(k)`.
pub fn tn_statistic(series: &TimeSeries, window: &TestWindow) -> Result<TestResult> {
    let profile = RankProfile::new(series);
    tn_from_profile(&profile, window)
}

pub fn tn_from_profile(profile: &RankProfile, window: &TestWindow) -> Result<TestResult> {
    scan_window(profile.cusum(), window, profile.tie_flag())
}

/// Self-normalized CUSUM test on the raw values.
pub fn sn_cusum_statistic(series: &TimeSeries, window: &TestWindow) -> Result<TestResult> {
    let cusum = CusumProfile::from_values(series.values());
    scan_window(&cusum, window, false)
}

/// Direct O(n²) transcription of `G_n(k)` from ranks and segment means.
///
/// Ranks are counted pairwise (midranks on ties) rather than sorted. Meant
/// as a reference for small `n`.
pub fn naive_gn_oracle(series: &TimeSeries, k: usize) -> f64 {
    let x = series.values();
    let n = x.len();
    assert!(k >= 1 && k < n);
    let ranks: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let less = x.iter().filter(|&&xj| xj < xi).count();
            let equal = x.iter().filter(|&&xj| xj == xi).count();
            less as f64 + (equal as f64 + 1.0) / 2.0
        })
        .collect();

    let total: f64 = ranks.iter().sum();
    let head: f64 = ranks[..k].iter().sum();
    let numerator = (head - k as f64 / n as f64 * total).abs();

    // S_t(j, m) over 1-based indices j..=t, centered at the mean of j..=m
    let segment_sq = |j: usize, m: usize| -> f64 {
        let mean = ranks[j - 1..m].iter().sum::<f64>() / (m - j + 1) as f64;
        (j..=m)
            .map(|t| {
                let s: f64 = ranks[j - 1..t].iter().map(|r| r - mean).sum();
                s * s
            })
            .sum()
    };
    let den_sum = segment_sq(1, k) + segment_sq(k + 1, n);
    ratio(numerator, den_sum, n, 1.0).0
}
