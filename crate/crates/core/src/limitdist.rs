// SPDX-License-Identifier: MIT OR Apache-2.0

//! Simulated limit distribution of `T_n` and its critical values.
//!
//! Under the null with Hermite rank one the statistic converges to
//!
//! ```text
//! sup_{λ∈[τ1,τ2]} |B_H(λ) − λ B_H(1)|
//!     / { ∫_0^λ V_H(r;0,λ)² dr + ∫_λ^1 V_H(r;λ,1)² dr }^{1/2}
//! V_H(r; r1, r2) = B_H(r) − B_H(r1) − (r−r1)/(r2−r1) (B_H(r2) − B_H(r1))
//! ```
//!
//! The functional is discretized on the grid `k/N`: the supremum runs over
//! `⌊Nτ1⌋ ≤ k ≤ ⌊Nτ2⌋` and each integral is a left-endpoint Riemann sum of the
//! squared bridge, i.e. the finite-sample step structure with the path
//! values taking the place of partial sums.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fgn::{fbm_from_increments, FgnParams, FgnSampler};
use crate::rankstat::CusumProfile;
use crate::rng::{stream_rng, STREAM_LIMIT};
use crate::sntest::{scan_window, TestWindow};

pub const GENERATOR: &str = "davies-harte-circulant-chacha8";

pub const DEFAULT_GRID: usize = 1000;
pub const DEFAULT_REPLICATIONS: usize = 10_000;
pub const DEFAULT_LEVELS: [f64; 3] = [0.10, 0.05, 0.01];

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSimSpec {
    pub hurst: f64,
    pub grid_size: usize,
    pub replications: usize,
    pub window: TestWindow,
    pub levels: Vec<f64>,
    pub master_seed: u64,
}

impl LimitSimSpec {
    /// Spec with the default grid, replication count, window and levels.
    pub fn new(hurst: f64, master_seed: u64) -> Self {
        Self {
            hurst,
            grid_size: DEFAULT_GRID,
            replications: DEFAULT_REPLICATIONS,
            window: TestWindow::default(),
            levels: DEFAULT_LEVELS.to_vec(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.5 && self.hurst < 1.0) {
            return Err(Error::InvalidHurst {
                value: self.hurst,
                range: "(0.5, 1)",
            });
        }
        if self.grid_size < 100 {
            return Err(Error::invalid("grid", format!("{} < 100", self.grid_size)));
        }
        if self.replications < 100 {
            return Err(Error::invalid(
                "reps",
                format!("{} < 100", self.replications),
            ));
        }
        if self.levels.is_empty() {
            return Err(Error::invalid("levels", "no levels given"));
        }
        if let Some(bad) = self.levels.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::invalid("levels", format!("{bad} not in (0, 1)")));
        }
        self.window.index_range(self.grid_size)?;
        Ok(())
    }
}

/// Discretized limit functional of a path `B(i/N)`, `i = 1..=N`.
pub fn bridge_functional(path: &[f64], window: &TestWindow) -> Result<f64> {
    let profile = CusumProfile::from_partial_sums(path);
    Ok(scan_window(&profile, window, false)?.statistic)
}

/// Draws replications of the limit functional for one spec.
#[derive(Debug, Clone)]
pub struct LimitSimulator {
    spec: LimitSimSpec,
    sampler: FgnSampler,
}

impl LimitSimulator {
    pub fn new(spec: LimitSimSpec) -> Result<Self> {
        spec.validate()?;
        let sampler = FgnSampler::new(FgnParams::new(spec.hurst, spec.grid_size)?)?;
        Ok(Self { spec, sampler })
    }

    pub fn spec(&self) -> &LimitSimSpec {
        &self.spec
    }

    /// The fBm path used by replication `index`.
    pub fn path(&self, index: u64) -> Vec<f64> {
        let mut rng = stream_rng(self.spec.master_seed, index, STREAM_LIMIT);
        let noise = self.sampler.sample_with(&mut rng);
        fbm_from_increments(self.spec.hurst, &noise)
    }

    pub fn sample(&self, index: u64) -> f64 {
        bridge_functional(&self.path(index), &self.spec.window)
            .expect("window validated against grid")
    }

    /// All replications, in replication order.
    pub fn samples(&self) -> Vec<f64> {
        (0..self.spec.replications as u64)
            .into_par_iter()
            .map(|i| self.sample(i))
            .collect()
    }
}

pub fn limit_statistic_sample(spec: &LimitSimSpec, replication_index: u64) -> Result<f64> {
    Ok(LimitSimulator::new(spec.clone())?.sample(replication_index))
}

/// Upper empirical quantile: the order statistic of rank `⌈(1−α)R⌉`.
///
/// `sorted` must be ascending.
pub fn upper_quantile(sorted: &[f64], level: f64) -> f64 {
    let r = sorted.len();
    assert!(r > 0, "empty sample");
    let rank = ((1.0 - level) * r as f64).ceil() as usize;
    sorted[rank.clamp(1, r) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValueTable {
    pub hurst: f64,
    pub window: TestWindow,
    pub grid: usize,
    pub reps: usize,
    pub seed: u64,
    pub generator: String,
    /// `(level, critical value)`, in the order the levels were requested.
    pub quantiles: Vec<(f64, f64)>,
}

pub fn critical_values(spec: &LimitSimSpec) -> Result<CriticalValueTable> {
    let simulator = LimitSimulator::new(spec.clone())?;
    let mut samples = simulator.samples();
    samples.sort_by(f64::total_cmp);
    Ok(CriticalValueTable::from_sorted(spec, &samples))
}

impl CriticalValueTable {
    pub fn from_sorted(spec: &LimitSimSpec, sorted: &[f64]) -> Self {
        Self {
            hurst: spec.hurst,
            window: spec.window,
            grid: spec.grid_size,
            reps: sorted.len(),
            seed: spec.master_seed,
            generator: GENERATOR.to_string(),
            quantiles: spec
                .levels
                .iter()
                .map(|&level| (level, upper_quantile(sorted, level)))
                .collect(),
        }
    }

    pub fn get(&self, level: f64) -> Result<f64> {
        self.quantiles
            .iter()
            .find(|(l, _)| (l - level).abs() < 1e-9)
            .map(|&(_, v)| v)
            .ok_or(Error::MissingCriticalValue { level })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TableRepr::from(self)).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: TableRepr = serde_json::from_str(text)
            .map_err(|e| Error::invalid("critical-values", e.to_string()))?;
        repr.try_into()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("hurst,tau1,tau2,grid,reps,seed,level,critical_value\n");
        for (level, value) in &self.quantiles {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.hurst,
                self.window.tau1(),
                self.window.tau2(),
                self.grid,
                self.reps,
                self.seed,
                level,
                value
            ));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    hurst: f64,
    window: WindowRepr,
    grid: usize,
    reps: usize,
    seed: u64,
    #[serde(default)]
    generator: Option<String>,
    quantiles: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    tau1: f64,
    tau2: f64,
}

impl From<&CriticalValueTable> for TableRepr {
    fn from(t: &CriticalValueTable) -> Self {
        Self {
            hurst: t.hurst,
            window: WindowRepr {
                tau1: t.window.tau1(),
                tau2: t.window.tau2(),
            },
            grid: t.grid,
            reps: t.reps,
            seed: t.seed,
            generator: Some(t.generator.clone()),
            quantiles: t
                .quantiles
                .iter()
                .map(|(l, v)| (l.to_string(), *v))
                .collect(),
        }
    }
}

impl TryFrom<TableRepr> for CriticalValueTable {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        let mut quantiles = r
            .quantiles
            .iter()
            .map(|(key, &value)| {
                key.parse::<f64>()
                    .map(|level| (level, value))
                    .map_err(|_| Error::invalid("critical-values", format!("bad level key {key:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        quantiles.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(Self {
            hurst: r.hurst,
            window: TestWindow::new(r.window.tau1, r.window.tau2)?,
            grid: r.grid,
            reps: r.reps,
            seed: r.seed,
            generator: r.generator.unwrap_or_else(|| "unknown".into()),
            quantiles,
        })
    }
}
