// SPDX-License-Identifier: MIT OR Apache-2.0

use lrd_cp::fgn::{build_sampler, FgnParams};
use lrd_cp::limitdist::{critical_values, LimitSimSpec};
use lrd_cp::rankstat::{build_profile, compute_ranks, TimeSeries};
use lrd_cp::sntest::{
    gn_statistic, naive_gn_oracle, sn_cusum_statistic, tn_statistic, TestWindow,
};
use proptest::prelude::*;
use rayon::prelude::*;

fn brute_double_sum(x: &[f64], k: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..k {
        for j in k..x.len() {
            s += if x[i] <= x[j] { 0.5 } else { -0.5 };
        }
    }
    s
}

/// Distinct values so that no ties occur.
fn distinct_series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::hash_set(-100_000i64..100_000, 5..=200).prop_flat_map(|set| {
        let values: Vec<f64> = set.into_iter().map(|v| v as f64 / 7.0).collect();
        Just(values).prop_shuffle()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn profile_is_wilcoxon_double_sum(x in distinct_series()) {
        let series = TimeSeries::new(x.clone()).unwrap();
        let p = build_profile(&series);
        prop_assert!(!p.tie_flag());
        for k in 1..=x.len() {
            prop_assert!((p.d()[k] - brute_double_sum(&x, k)).abs() < 1e-9);
        }
        prop_assert_eq!(p.d()[x.len()], 0.0);
    }

    #[test]
    fn ranks_sum_to_triangular_number(
        x in prop::collection::vec(prop::sample::select(vec![-1.0, 0.0, 0.5, 2.0, 3.5]), 4..60)
    ) {
        let series = TimeSeries::new(x.clone()).unwrap();
        let n = x.len() as f64;
        let ranks = compute_ranks(&series);
        prop_assert_eq!(ranks.iter().sum::<f64>(), n * (n + 1.0) / 2.0);
        prop_assert_eq!(build_profile(&series).d()[x.len()], 0.0);
    }

    #[test]
    fn profile_invariant_under_monotone_maps(x in distinct_series(), a in 0.01f64..10.0) {
        let base = build_profile(&TimeSeries::new(x.clone()).unwrap());
        let mapped: Vec<f64> = x.iter().map(|v| (a * v).atan() + a * v).collect();
        let other = build_profile(&TimeSeries::new(mapped).unwrap());
        prop_assert_eq!(base, other);
    }

    #[test]
    fn fast_statistic_matches_oracle_with_ties(
        x in prop::collection::vec(prop::sample::select(vec![-2.0, -1.0, 0.0, 1.0, 4.0]), 4..80)
    ) {
        let series = TimeSeries::new(x.clone()).unwrap();
        let p = build_profile(&series);
        for k in 1..x.len() {
            let fast = gn_statistic(&p, k);
            let oracle = naive_gn_oracle(&series, k);
            if oracle.is_infinite() || fast.is_infinite() {
                prop_assert_eq!(fast, oracle);
            } else {
                prop_assert!((fast - oracle).abs() / (1.0 + oracle) < 1e-9, "k={} {} {}", k, fast, oracle);
            }
        }
    }
}

#[test]
fn oracle_equivalence_on_fgn_supremum() {
    let n = 1000;
    let x = build_sampler(FgnParams::new(0.7, n).unwrap()).unwrap().sample(2024);
    let series = TimeSeries::new(x).unwrap();
    let window = TestWindow::default();
    let result = tn_statistic(&series, &window).unwrap();
    let (lo, hi) = window.index_range(n).unwrap();
    let naive: Vec<f64> = (lo..=hi)
        .into_par_iter()
        .map(|k| naive_gn_oracle(&series, k))
        .collect();
    let naive_max = naive.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((result.statistic - naive_max).abs() / (1.0 + naive_max) < 1e-9);
    for (g, o) in result.profile.iter().zip(&naive) {
        assert!((g - o).abs() / (1.0 + o) < 1e-9);
    }
}

#[test]
fn reversal_reflects_the_profile() {
    let n = 200;
    let x = build_sampler(FgnParams::new(0.65, n).unwrap()).unwrap().sample(8);
    let mut reversed = x.clone();
    reversed.reverse();
    let fwd = build_profile(&TimeSeries::new(x.clone()).unwrap());
    let bwd = build_profile(&TimeSeries::new(reversed.clone()).unwrap());
    for k in 1..n {
        let a = gn_statistic(&fwd, k);
        let b = gn_statistic(&bwd, n - k);
        assert!((a - b).abs() < 1e-9 * (1.0 + a), "k={k}: {a} vs {b}");
    }
    // 0.15·200 and 0.85·200 are integers, so the window maps onto itself.
    let window = TestWindow::default();
    let tf = tn_statistic(&TimeSeries::new(x).unwrap(), &window).unwrap();
    let tb = tn_statistic(&TimeSeries::new(reversed).unwrap(), &window).unwrap();
    assert!((tf.statistic - tb.statistic).abs() < 1e-9 * (1.0 + tf.statistic));
}

#[test]
fn location_shift_leaves_result_unchanged() {
    let x = build_sampler(FgnParams::new(0.8, 300).unwrap()).unwrap().sample(77);
    let window = TestWindow::default();
    let base = tn_statistic(&TimeSeries::new(x.clone()).unwrap(), &window).unwrap();
    for c in [-12.5, 0.25, 1000.0] {
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        assert_eq!(
            tn_statistic(&TimeSeries::new(shifted).unwrap(), &window).unwrap(),
            base
        );
    }
}

#[test]
fn outlier_flips_cusum_more_often_than_wilcoxon() {
    let hurst = 0.7;
    let n = 500;
    let mut spec = LimitSimSpec::new(hurst, 31);
    spec.replications = 2000;
    let cv = critical_values(&spec).unwrap().get(0.05).unwrap();
    let sampler = build_sampler(FgnParams::new(hurst, n).unwrap()).unwrap();
    let window = TestWindow::default();
    let outlier_at = n / 3;

    let flips: Vec<(bool, bool)> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let clean = sampler.sample(seed);
            let mut dirty = clean.clone();
            dirty[outlier_at] += 100.0;
            let clean = TimeSeries::new(clean).unwrap();
            let dirty = TimeSeries::new(dirty).unwrap();
            let decide = |s: &TimeSeries, rank: bool| {
                let r = if rank {
                    tn_statistic(s, &window)
                } else {
                    sn_cusum_statistic(s, &window)
                };
                r.unwrap().statistic > cv
            };
            (
                decide(&clean, false) != decide(&dirty, false),
                decide(&clean, true) != decide(&dirty, true),
            )
        })
        .collect();
    let cusum_flips = flips.iter().filter(|f| f.0).count();
    let wilcoxon_flips = flips.iter().filter(|f| f.1).count();
    assert!(
        cusum_flips > wilcoxon_flips,
        "cusum {cusum_flips} vs wilcoxon {wilcoxon_flips}"
    );
}
