// SPDX-License-Identifier: MIT OR Apache-2.0

use std::sync::OnceLock;

use lrd_cp::limitdist::{critical_values, CriticalValueTable, LimitSimSpec};
use lrd_cp::montecarlo::{
    run_consistency_sweep, run_experiment, run_local_alternative_sweep, simulate_statistics,
    ExperimentKind, ExperimentSpec, SweepConfig,
};
use lrd_cp::sntest::TestWindow;

const SEED: u64 = 4242;

fn table(hurst: f64) -> &'static CriticalValueTable {
    static TABLES: OnceLock<Vec<CriticalValueTable>> = OnceLock::new();
    TABLES
        .get_or_init(|| {
            [0.6, 0.7]
                .iter()
                .map(|&h| {
                    let mut spec = LimitSimSpec::new(h, SEED);
                    spec.replications = 4000;
                    critical_values(&spec).unwrap()
                })
                .collect()
        })
        .iter()
        .find(|t| (t.hurst - hurst).abs() < 1e-12)
        .unwrap()
}

fn config(hurst: f64, replications: usize) -> SweepConfig {
    SweepConfig {
        hurst,
        tau: 0.5,
        level: 0.05,
        replications,
        window: TestWindow::default(),
        master_seed: SEED,
    }
}

#[test]
fn statistics_do_not_depend_on_thread_count() {
    let spec = ExperimentSpec::power(0.7, 200, 1.0, 0.5, 0.05, 300, 9);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_statistics(&spec).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn size_is_coherent_across_seeds() {
    // Rejection counts from independent seeds should scatter like binomials
    // around a common rate.
    let reps = 1000;
    let rates: Vec<f64> = (0..6u64)
        .map(|s| {
            let spec = ExperimentSpec::size(0.7, 100, 0.05, reps, 100 + s);
            run_experiment(&spec, table(0.7)).unwrap().rejection_rate
        })
        .collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let se = (mean * (1.0 - mean) / reps as f64).sqrt();
    for r in &rates {
        assert!((r - mean).abs() < 4.0 * se, "{rates:?}");
    }
    assert!((mean - 0.05).abs() < 0.02, "pooled size {mean}");
}

#[test]
fn power_grows_with_shift_height() {
    let rates: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&delta| {
            let spec = ExperimentSpec::power(0.6, 100, delta, 0.5, 0.05, 1000, SEED);
            run_experiment(&spec, table(0.6)).unwrap().rejection_rate
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
}

#[test]
fn central_change_is_detected_more_often() {
    let reps = 2000;
    let rate = |tau| {
        let spec = ExperimentSpec::power(0.7, 100, 1.0, tau, 0.05, reps, SEED);
        run_experiment(&spec, table(0.7)).unwrap()
    };
    let mid = rate(0.5);
    let early = rate(0.25);
    let se = (mid.standard_error().powi(2) + early.standard_error().powi(2)).sqrt();
    assert!(
        mid.rejection_rate >= early.rejection_rate - 2.0 * se,
        "{} vs {}",
        mid.rejection_rate,
        early.rejection_rate
    );
}

#[test]
fn local_alternative_extremes() {
    let cfg = config(0.7, 1000);
    let null = run_local_alternative_sweep(&cfg, 0.0, &[200], table(0.7)).unwrap();
    assert!((null[0].rejection_rate - 0.05).abs() < 0.025);
    let strong = run_local_alternative_sweep(&cfg, 50.0, &[200, 500], table(0.7)).unwrap();
    for r in &strong {
        assert!(r.rejection_rate > 0.98, "n={}: {}", r.spec.n, r.rejection_rate);
        assert_eq!(r.spec.kind, ExperimentKind::LocalAlternative);
    }
}

#[test]
fn zero_shift_sweep_stays_at_level() {
    let results = run_consistency_sweep(&config(0.7, 1500), 0.0, &[100, 300, 600], table(0.7))
        .unwrap();
    for r in &results {
        assert!((r.rejection_rate - 0.05).abs() < 0.02, "n={}: {}", r.spec.n, r.rejection_rate);
    }
}

#[test]
fn moderate_shift_sweep_grows_with_n() {
    let results = run_consistency_sweep(&config(0.6, 2000), 0.5, &[100, 500], table(0.6)).unwrap();
    let small = results[0].rejection_rate;
    let large = results[1].rejection_rate;
    assert!(small > 0.15 && small < 0.5, "n=100: {small}");
    assert!(large > 2.0 * small, "n=500: {large}");
}

#[test]
fn median_statistic_diverges() {
    let results = run_consistency_sweep(&config(0.7, 200), 1.0, &[100, 500, 2000], table(0.7))
        .unwrap();
    let medians: Vec<f64> = results.iter().map(|r| r.median_statistic).collect();
    assert!(medians.windows(2).all(|w| w[0] < w[1]), "{medians:?}");
}
