// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ranks, the Wilcoxon partial-sum profile and its prefix moments.
//!
//! For partial sums `P_k = Σ_{i≤k} v_i` with mean `v̄ = P_n / n`, the profile
//! is `d[k] = k·v̄ − P_k`. With ranks as values this is
//! `d[k] = k(n+1)/2 − Σ_{i≤k} R_i`, which equals the Wilcoxon two-sample
//! double sum `Σ_{i≤k} Σ_{j>k} (1{X_i ≤ X_j} − ½)` on tie-free data.
//!
//! The within-segment partial sums of the self-normalizer are affine in the
//! profile, `S_t(1,k) = −(d[t] − (t/k) d[k])` and
//! `S_t(k+1,n) = −(d[t] − ((n−t)/(n−k)) d[k])`, so four running sums over
//! `d` are enough to evaluate the normalizer at any `k` in constant time.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Shortest series accepted by [`TimeSeries::new`].
pub const MIN_LENGTH: usize = 4;

/// Finite observations `X_1, …, X_n` with `n ≥ 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_LENGTH {
            return Err(Error::TooShort {
                min: MIN_LENGTH,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Ranks of `values` with midranks for ties, plus whether any tie occurred.
///
/// Sorting based, O(n log n). Values must not be NaN.
pub fn rank_values(values: &[f64]) -> (Vec<f64>, bool) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(Ordering::Equal)
    });

    let mut ranks = vec![0.0; n];
    let mut tied = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            tied = true;
        }
        // positions start..end hold ranks start+1..=end
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = midrank;
        }
        start = end;
    }
    (ranks, tied)
}

pub fn compute_ranks(series: &TimeSeries) -> Vec<f64> {
    rank_values(series.values()).0
}

/// Centered partial-sum profile of a sequence and its running moments.
///
/// All vectors are indexed `0..=n` so that entry `k` corresponds to the
/// 1-based index `k` of the formulas; entry 0 is an empty sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CusumProfile {
    n: usize,
    // magnitude of the partial sums; the degenerate rule works in these units
    unit: f64,
    d: Vec<f64>,
    prefix_q: Vec<f64>,
    prefix_td: Vec<f64>,
    suffix_q: Vec<f64>,
    suffix_md: Vec<f64>,
}

impl CusumProfile {
    /// Profile of raw values `v_1, …, v_n`.
    pub fn from_values(values: &[f64]) -> Self {
        let mut acc = 0.0;
        let partial: Vec<f64> = values
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        Self::from_partial_sums(&partial)
    }

    /// Profile from partial sums `P_1, …, P_n`, e.g. a sampled path `B(i/n)`.
    pub fn from_partial_sums(partial: &[f64]) -> Self {
        let n = partial.len();
        let mean = partial.last().copied().unwrap_or(0.0) / n.max(1) as f64;
        let mut d = Vec::with_capacity(n + 1);
        d.push(0.0);
        d.extend(
            partial
                .iter()
                .enumerate()
                .map(|(i, p)| (i + 1) as f64 * mean - p),
        );
        let unit = partial.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        let unit = if unit > 0.0 && unit.is_finite() { unit } else { 1.0 };
        Self::from_profile(d, unit)
    }

    /// Builds the moments for `d` given with the leading zero at index 0.
    fn from_profile(d: Vec<f64>, unit: f64) -> Self {
        let n = d.len() - 1;
        let mut prefix_q = vec![0.0; n + 1];
        let mut prefix_td = vec![0.0; n + 1];
        for t in 1..=n {
            prefix_q[t] = prefix_q[t - 1] + d[t] * d[t];
            prefix_td[t] = prefix_td[t - 1] + t as f64 * d[t];
        }
        let mut suffix_q = vec![0.0; n + 1];
        let mut suffix_md = vec![0.0; n + 1];
        for k in (0..n).rev() {
            let t = k + 1;
            suffix_q[k] = suffix_q[t] + d[t] * d[t];
            suffix_md[k] = suffix_md[t] + (n - t) as f64 * d[t];
        }
        Self {
            n,
            unit,
            d,
            prefix_q,
            prefix_td,
            suffix_q,
            suffix_md,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Scale of the underlying partial sums: 1 for rank profiles, `max |P_t|`
    /// for profiles of raw values.
    pub fn unit(&self) -> f64 {
        self.unit
    }

    /// `d[0..=n]`, with `d[0] = 0`.
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// `Σ_{t≤k} d[t]²`.
    pub fn prefix_q(&self) -> &[f64] {
        &self.prefix_q
    }

    /// `Σ_{t≤k} t·d[t]`.
    pub fn prefix_td(&self) -> &[f64] {
        &self.prefix_td
    }

    /// `Σ_{t>k} d[t]²`.
    pub fn suffix_q(&self) -> &[f64] {
        &self.suffix_q
    }

    /// `Σ_{t>k} (n−t)·d[t]`.
    pub fn suffix_md(&self) -> &[f64] {
        &self.suffix_md
    }

    /// Sum of squared within-segment partial sums for a split after `k`:
    /// `Σ_{t≤k} S_t(1,k)² + Σ_{t>k} S_t(k+1,n)²`. Requires `1 ≤ k ≤ n−1`.
    pub fn normalizer_sum(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k < self.n);
        let n = self.n;
        let dk = self.d[k];
        let kf = k as f64;
        let left_slope = dk / kf;
        let sum_t2 = kf * (kf + 1.0) * (2.0 * kf + 1.0) / 6.0;
        let left = self.prefix_q[k] - 2.0 * left_slope * self.prefix_td[k]
            + left_slope * left_slope * sum_t2;

        let m = (n - k) as f64;
        let right_slope = dk / m;
        let sum_m2 = (m - 1.0) * m * (2.0 * m - 1.0) / 6.0;
        let right = self.suffix_q[k] - 2.0 * right_slope * self.suffix_md[k]
            + right_slope * right_slope * sum_m2;

        // both parts are sums of squares; negative values are round-off
        left.max(0.0) + right.max(0.0)
    }
}

/// Ranks of a series with the Wilcoxon profile built on top of them.
#[derive(Debug, Clone, PartialEq)]
pub struct RankProfile {
    ranks: Vec<f64>,
    cusum: CusumProfile,
    tie_flag: bool,
}

pub fn build_profile(series: &TimeSeries) -> RankProfile {
    RankProfile::new(series)
}

impl RankProfile {
    pub fn new(series: &TimeSeries) -> Self {
        let (ranks, tie_flag) = rank_values(series.values());
        let n = ranks.len();
        // Σ R_i = n(n+1)/2 with or without midranks, so d[k] = k(n+1)/2 − Σ_{i≤k} R_i.
        let center = (n + 1) as f64 / 2.0;
        let mut d = Vec::with_capacity(n + 1);
        d.push(0.0);
        let mut acc = 0.0;
        for (i, r) in ranks.iter().enumerate() {
            acc += r;
            d.push((i + 1) as f64 * center - acc);
        }
        Self {
            ranks,
            cusum: CusumProfile::from_profile(d, 1.0),
            tie_flag,
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn tie_flag(&self) -> bool {
        self.tie_flag
    }

    pub fn cusum(&self) -> &CusumProfile {
        &self.cusum
    }

    /// `d[0..=n]`; `d[k]` is the Wilcoxon two-sample statistic for a split after `k`.
    pub fn d(&self) -> &[f64] {
        self.cusum.d()
    }
}
