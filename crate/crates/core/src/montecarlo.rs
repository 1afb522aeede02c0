// SPDX-License-Identifier: MIT OR Apache-2.0

//! Size, power, consistency and local-alternative experiments.
//!
//! Replication `r` draws fGn from the stream `(master_seed, r, STREAM_DATA)`,
//! adds a level shift after `k* = ⌊nτ⌋` and runs the test. Statistics are
//! collected in replication order, so counts do not depend on the thread
//! pool.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fgn::{FgnParams, FgnSampler};
use crate::limitdist::CriticalValueTable;
use crate::rankstat::{RankProfile, TimeSeries};
use crate::rng::{stream_rng, STREAM_DATA};
use crate::sntest::{tn_from_profile, TestWindow};

pub const SIZE_REPLICATIONS: usize = 10_000;
pub const POWER_REPLICATIONS: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Size,
    Power,
    Consistency,
    LocalAlternative,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Size => "size",
            ExperimentKind::Power => "power",
            ExperimentKind::Consistency => "consistency",
            ExperimentKind::LocalAlternative => "local-alt",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "size" => Ok(ExperimentKind::Size),
            "power" => Ok(ExperimentKind::Power),
            "consistency" => Ok(ExperimentKind::Consistency),
            "local-alt" | "local_alt" | "local-alternative" | "local_alternative" => {
                Ok(ExperimentKind::LocalAlternative)
            }
            other => Err(Error::invalid("kind", format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub hurst: f64,
    pub n: usize,
    /// Fixed shift height Δ (size: 0).
    pub delta: f64,
    /// Change fraction; the shift starts after `⌊nτ⌋`.
    pub tau: f64,
    /// Local-alternative scale, `h_n = c·n^{H−1}`.
    pub c: f64,
    pub level: f64,
    pub replications: usize,
    pub window: TestWindow,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn size(hurst: f64, n: usize, level: f64, replications: usize, seed: u64) -> Self {
        Self {
            kind: ExperimentKind::Size,
            hurst,
            n,
            delta: 0.0,
            tau: 0.5,
            c: 0.0,
            level,
            replications,
            window: TestWindow::default(),
            master_seed: seed,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn power(
        hurst: f64,
        n: usize,
        delta: f64,
        tau: f64,
        level: f64,
        replications: usize,
        seed: u64,
    ) -> Self {
        Self {
            kind: ExperimentKind::Power,
            delta,
            tau,
            ..Self::size(hurst, n, level, replications, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        FgnParams::new(self.hurst, self.n)?;
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::invalid("tau", format!("{} not in (0, 1)", self.tau)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::invalid("level", format!("{} not in (0, 1)", self.level)));
        }
        if self.replications == 0 {
            return Err(Error::invalid("reps", "must be positive"));
        }
        if !self.delta.is_finite() || !self.c.is_finite() {
            return Err(Error::invalid("delta", "shift parameters must be finite"));
        }
        match self.kind {
            ExperimentKind::Size if self.delta != 0.0 => {
                return Err(Error::invalid("delta", "size experiments have delta = 0"))
            }
            ExperimentKind::Power if self.delta == 0.0 => {
                return Err(Error::invalid("delta", "power experiments need delta != 0"))
            }
            _ => {}
        }
        TimeSeries::new(vec![0.0; self.n])?;
        self.window.index_range(self.n)?;
        Ok(())
    }

    /// Shift added after the change point.
    pub fn shift_height(&self) -> f64 {
        match self.kind {
            ExperimentKind::Size => 0.0,
            ExperimentKind::Power | ExperimentKind::Consistency => self.delta,
            ExperimentKind::LocalAlternative => {
                self.c * (self.n as f64).powf(self.hurst - 1.0)
            }
        }
    }

    pub fn change_point(&self) -> usize {
        ((self.n as f64) * self.tau).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rejection_rate: f64,
    pub rejection_count: usize,
    pub critical_value_used: f64,
    pub mean_statistic: f64,
    pub median_statistic: f64,
    pub wall_clock_seconds: f64,
}

impl ExperimentResult {
    pub const CSV_HEADER: &'static str = "kind,hurst,n,delta,tau,c,level,reps,rejection_rate,cv,seed";

    pub fn csv_row(&self) -> String {
        let s = &self.spec;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.kind,
            s.hurst,
            s.n,
            s.delta,
            s.tau,
            s.c,
            s.level,
            s.replications,
            self.rejection_rate,
            self.critical_value_used,
            s.master_seed
        )
    }

    /// Binomial standard error of the rejection rate.
    pub fn standard_error(&self) -> f64 {
        let p = self.rejection_rate;
        (p * (1.0 - p) / self.spec.replications as f64).sqrt()
    }
}

fn check_table(spec: &ExperimentSpec, cv: &CriticalValueTable) -> Result<f64> {
    if (cv.hurst - spec.hurst).abs() > 1e-9 {
        return Err(Error::TableMismatch(format!(
            "table hurst {} vs experiment hurst {}",
            cv.hurst, spec.hurst
        )));
    }
    if cv.window != spec.window {
        return Err(Error::TableMismatch(format!(
            "table window [{}, {}] vs experiment window [{}, {}]",
            cv.window.tau1(),
            cv.window.tau2(),
            spec.window.tau1(),
            spec.window.tau2()
        )));
    }
    cv.get(spec.level)
}

/// Test statistics `T_n` of every replication, in replication order.
pub fn simulate_statistics(spec: &ExperimentSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let sampler = FgnSampler::new(FgnParams::new(spec.hurst, spec.n)?)?;
    let shift = spec.shift_height();
    let change = spec.change_point();
    let stats = (0..spec.replications as u64)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(buffer, values), r| {
                let mut rng = stream_rng(spec.master_seed, r, STREAM_DATA);
                sampler.sample_into(&mut rng, buffer, values);
                if shift != 0.0 {
                    for v in &mut values[change..] {
                        *v += shift;
                    }
                }
                let series = TimeSeries::new(values.clone()).expect("finite fGn sample");
                tn_from_profile(&RankProfile::new(&series), &spec.window)
                    .expect("window validated")
                    .statistic
            },
        )
        .collect();
    Ok(stats)
}

/// Aggregates precomputed statistics against a critical value.
pub fn summarize(
    spec: &ExperimentSpec,
    statistics: &[f64],
    critical_value: f64,
    wall_clock_seconds: f64,
) -> ExperimentResult {
    let rejection_count = statistics.iter().filter(|&&t| t > critical_value).count();
    let reps = statistics.len();
    let mut sorted = statistics.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if reps == 0 {
        f64::NAN
    } else if reps % 2 == 1 {
        sorted[reps / 2]
    } else {
        0.5 * (sorted[reps / 2 - 1] + sorted[reps / 2])
    };
    ExperimentResult {
        spec: spec.clone(),
        rejection_rate: rejection_count as f64 / reps as f64,
        rejection_count,
        critical_value_used: critical_value,
        mean_statistic: statistics.iter().sum::<f64>() / reps as f64,
        median_statistic: median,
        wall_clock_seconds,
    }
}

pub fn run_experiment(spec: &ExperimentSpec, cv: &CriticalValueTable) -> Result<ExperimentResult> {
    let critical_value = check_table(spec, cv)?;
    let start = Instant::now();
    let statistics = simulate_statistics(spec)?;
    Ok(summarize(
        spec,
        &statistics,
        critical_value,
        start.elapsed().as_secs_f64(),
    ))
}

/// Shared settings of a sweep over sample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub hurst: f64,
    pub tau: f64,
    pub level: f64,
    pub replications: usize,
    pub window: TestWindow,
    pub master_seed: u64,
}

impl SweepConfig {
    fn spec(&self, kind: ExperimentKind, n: usize, delta: f64, c: f64) -> ExperimentSpec {
        ExperimentSpec {
            kind,
            hurst: self.hurst,
            n,
            delta,
            tau: self.tau,
            c,
            level: self.level,
            replications: self.replications,
            window: self.window,
            master_seed: self.master_seed,
        }
    }
}

/// Fixed shift `delta` at every `n`.
pub fn run_consistency_sweep(
    config: &SweepConfig,
    delta: f64,
    n_list: &[usize],
    cv: &CriticalValueTable,
) -> Result<Vec<ExperimentResult>> {
    n_list
        .iter()
        .map(|&n| run_experiment(&config.spec(ExperimentKind::Consistency, n, delta, 0.0), cv))
        .collect()
}

/// Shift `h_n = c·n^{H−1}` shrinking with `n`.
pub fn run_local_alternative_sweep(
    config: &SweepConfig,
    c: f64,
    n_list: &[usize],
    cv: &CriticalValueTable,
) -> Result<Vec<ExperimentResult>> {
    n_list
        .iter()
        .map(|&n| {
            run_experiment(
                &config.spec(ExperimentKind::LocalAlternative, n, 0.0, c),
                cv,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitdist::GENERATOR;

    fn table(hurst: f64, quantiles: Vec<(f64, f64)>) -> CriticalValueTable {
        CriticalValueTable {
            hurst,
            window: TestWindow::default(),
            grid: 1000,
            reps: 10_000,
            seed: 0,
            generator: GENERATOR.into(),
            quantiles,
        }
    }

    #[test]
    fn kind_parsing() {
        for kind in [
            ExperimentKind::Size,
            ExperimentKind::Power,
            ExperimentKind::Consistency,
            ExperimentKind::LocalAlternative,
        ] {
            assert_eq!(kind.as_str().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert!("banana".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = ExperimentSpec::size(0.7, 100, 0.05, 10, 1);
        assert!(s.validate().is_ok());
        s.delta = 1.0;
        assert_eq!(s.validate().unwrap_err().parameter(), Some("delta"));
        let p = ExperimentSpec::power(0.7, 100, 0.0, 0.5, 0.05, 10, 1);
        assert!(p.validate().is_err());
        let p = ExperimentSpec::power(0.7, 100, 1.0, 1.0, 0.05, 10, 1);
        assert_eq!(p.validate().unwrap_err().parameter(), Some("tau"));
        let p = ExperimentSpec::power(1.3, 100, 1.0, 0.5, 0.05, 10, 1);
        assert_eq!(p.validate().unwrap_err().parameter(), Some("hurst"));
    }

    #[test]
    fn local_alternative_height() {
        let mut s = ExperimentSpec::size(0.7, 1000, 0.05, 10, 1);
        s.kind = ExperimentKind::LocalAlternative;
        s.c = 5.0;
        assert!((s.shift_height() - 5.0 * 1000f64.powf(-0.3)).abs() < 1e-12);
        assert_eq!(s.change_point(), 500);
    }

    #[test]
    fn table_checks() {
        let spec = ExperimentSpec::size(0.7, 50, 0.05, 20, 1);
        assert!(matches!(
            run_experiment(&spec, &table(0.8, vec![(0.05, 9.0)])),
            Err(Error::TableMismatch(_))
        ));
        assert!(matches!(
            run_experiment(&spec, &table(0.7, vec![(0.1, 6.8)])),
            Err(Error::MissingCriticalValue { .. })
        ));
    }

    #[test]
    fn summary_counts() {
        let spec = ExperimentSpec::size(0.7, 50, 0.05, 4, 1);
        let r = summarize(&spec, &[1.0, 9.0, 3.0, 10.0], 8.0, 0.0);
        assert_eq!(r.rejection_count, 2);
        assert_eq!(r.rejection_rate, 0.5);
        assert_eq!(r.median_statistic, 6.0);
        assert_eq!(r.mean_statistic, 5.75);
        assert_eq!(
            r.csv_row(),
            "size,0.7,50,0,0.5,0,0.05,4,0.5,8,1"
        );
    }

    #[test]
    fn statistics_are_reproducible() {
        let spec = ExperimentSpec::power(0.8, 64, 1.0, 0.25, 0.05, 32, 99);
        let a = simulate_statistics(&spec).unwrap();
        let b = simulate_statistics(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 32);
    }
}
