mod common;

use kakutani::discrepancy::{
    asymptotic_density, closed_form_density, discrepancy_scan, growth_fit, loglog_svg,
    prefix_count, DensityMethod, Grid, GrowthModel, PrefixCounter, ScanOptions,
};
use kakutani::engine::{FlowTime, KakutaniRule};
use kakutani::params::{solve_alpha, RatioClass};
use kakutani::spectral::f_alpha_poly;
use kakutani::spectral::find_roots;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;

const LN2: f64 = std::f64::consts::LN_2;

fn ratio(n: u32, m: u32) -> (f64, RatioClass) {
    (
        solve_alpha(n, m).unwrap(),
        RatioClass::Commensurable { n, m },
    )
}

fn third() -> (f64, RatioClass) {
    (
        1.0 / 3.0,
        RatioClass::Incommensurable {
            r: 3f64.ln() / 1.5f64.ln(),
        },
    )
}

fn dyadic(
    alpha: f64,
    class: &RatioClass,
    lo: u32,
    hi: u32,
) -> kakutani::discrepancy::DiscrepancySeries {
    let opts = ScanOptions::new(Grid::Dyadic {
        min_exp: lo,
        max_exp: hi,
    });
    discrepancy_scan(alpha, class, hi as f64 * LN2, &opts).unwrap()
}

#[test]
fn density_examples() {
    assert!((closed_form_density(0.5) - std::f64::consts::LOG2_E).abs() < 1e-12);
    let d = asymptotic_density(0.5, &RatioClass::Commensurable { n: 1, m: 1 }).unwrap();
    assert_eq!((d.value, d.method), (1.0, DensityMethod::Perron));

    let (a, c) = third();
    let d = asymptotic_density(a, &c).unwrap();
    assert_eq!(d.method, DensityMethod::ClosedForm);
    let entropy = (3f64.ln() + 2.0 * 1.5f64.ln()) / 3.0;
    assert!((d.value - 1.0 / entropy).abs() < 1e-12);
    assert!((d.value - 1.5711).abs() < 1e-4);
    assert!(asymptotic_density(0.6, &c).is_err());
}

#[test]
fn incommensurable_density_converges_slowly() {
    // At x ≈ 10^6 the count ratio still sits near 1.60, about 2% above the
    // limit; the discrepancy bound must still cover the gap.
    let (a, c) = third();
    let t = 1e6f64.ln();
    let counter = PrefixCounter::new(
        &KakutaniRule::new(a)
            .unwrap()
            .horizon(FlowTime::Real(t))
            .unwrap(),
    );
    let x = 1e6;
    let empirical = counter.count_upto(x).unwrap().to_f64().unwrap() / x;
    assert!((empirical - 1.606).abs() < 0.01 * 1.606, "{empirical}");
    let d = asymptotic_density(a, &c).unwrap().value;
    let s = discrepancy_scan(
        a,
        &c,
        t,
        &ScanOptions::new(Grid::Explicit { windows: vec![x] }),
    )
    .unwrap();
    assert!((empirical - d).abs() <= s.max_disc[0] / x + 1e-12);
}

#[test]
fn perron_density_matches_counts() {
    let (a, c) = ratio(2, 1);
    let d = asymptotic_density(a, &c).unwrap();
    assert_eq!(d.method, DensityMethod::Perron);
    let rule = KakutaniRule::commensurable(2, 1).unwrap();
    let ell = (1..)
        .find(|&l| common::step_count(2, 1, l) >= 10_000_000)
        .unwrap();
    let h = rule.horizon(FlowTime::Steps(ell)).unwrap();
    let empirical = common::step_count(2, 1, ell) as f64 / h.scale();
    assert!((empirical / d.value - 1.0).abs() < 1e-3);

    for (n, m) in [(3, 2), (3, 1), (4, 1), (5, 2), (7, 3)] {
        let (a, c) = ratio(n, m);
        let d = asymptotic_density(a, &c).unwrap().value;
        let rule = KakutaniRule::commensurable(n, m).unwrap();
        let ell = (1..)
            .find(|&l| common::step_count(n, m, l) >= 10_000_000)
            .unwrap();
        let h = rule.horizon(FlowTime::Steps(ell)).unwrap();
        let empirical = common::step_count(n, m, ell) as f64 / h.scale();
        assert!(
            (empirical / d - 1.0).abs() < 2e-2,
            "({n},{m}) {empirical} vs {d}"
        );
    }
}

#[test]
fn prefix_examples() {
    assert_eq!(
        prefix_count(0.5, 3.0 * LN2, 3.5).unwrap(),
        BigUint::from(4u32)
    );
    assert_eq!(
        prefix_count(1.0 / 3.0, 3f64.ln(), 1.7).unwrap(),
        BigUint::from(3u32)
    );
    assert!(prefix_count(1.0 / 3.0, 3f64.ln(), 3.1).is_err());
    assert!(prefix_count(1.0 / 3.0, 3f64.ln(), -0.5).is_err());
}

#[test]
fn prefix_matches_materialized_patch_at_fifteen() {
    let (a, t) = (0.3, 15.0);
    let p = KakutaniRule::new(a)
        .unwrap()
        .patch(FlowTime::Real(t), 1 << 27)
        .unwrap();
    let counter = PrefixCounter::new(
        &KakutaniRule::new(a)
            .unwrap()
            .horizon(FlowTime::Real(t))
            .unwrap(),
    );
    let top = t.exp();
    let pos: Vec<f64> = (0..p.len()).map(|i| p.real_position(i)).collect();
    for k in 0..=200 {
        let x = top * k as f64 / 200.0;
        let want = pos.partition_point(|&y| y <= x + 1e-9 * x.max(1.0));
        assert_eq!(counter.count_upto(x).unwrap(), BigUint::from(want), "x={x}");
    }
    assert_eq!(counter.count_upto(top).unwrap(), BigUint::from(p.len()));
}

#[test]
fn lattice_and_plateaus() {
    let s = dyadic(0.5, &RatioClass::Commensurable { n: 1, m: 1 }, 4, 20);
    assert!(s.max_disc.iter().all(|&v| v <= 1.0));
    let (a, c) = ratio(2, 1);
    let s = discrepancy_scan(
        a,
        &c,
        1e6f64.ln(),
        &ScanOptions::new(Grid::Dyadic {
            min_exp: 4,
            max_exp: 19,
        }),
    )
    .unwrap();
    let last = *s.max_disc.last().unwrap();
    assert!(s.max_disc.iter().all(|&v| v <= last));
    assert!(s.max_disc[10..].iter().all(|&v| v == last));
}

/// Regression-locked plateau values of the anchored discrepancy on windows
/// 2^10..2^24, up to float accumulation along ~2·10^7 tile positions.
const GOLDEN: [((u32, u32), f64); 4] = [
    ((2, 1), 1.2763932022500213),
    ((3, 2), 1.621657520532608),
    ((3, 1), 1.6050505433231592),
    ((4, 1), 2.3725851310882717),
];
const GOLDEN_SLACK: f64 = 1e-6;

#[test]
fn spread_cases_stay_bounded() {
    for ((n, m), golden) in GOLDEN {
        let (a, c) = ratio(n, m);
        let s = dyadic(a, &c, 10, 24);
        let top = s.max_disc.iter().cloned().fold(0.0, f64::max);
        assert!(top <= golden + GOLDEN_SLACK, "({n},{m}) {top} > {golden}");
        assert!(
            (top - golden).abs() < GOLDEN_SLACK,
            "({n},{m}) drifted: {top}"
        );
        // |N(W)/W − d| ≤ max_disc(W)/W → 0.
        let rel: Vec<f64> = s
            .window_sizes
            .iter()
            .zip(&s.max_disc)
            .map(|(w, d)| d / w)
            .collect();
        assert!(rel.windows(2).all(|r| r[1] <= r[0]));
        assert!(s.max_disc.last().unwrap() / s.window_sizes.last().unwrap() < 1e-6);
        let fit = growth_fit(&s).unwrap();
        assert_eq!(fit.best, GrowthModel::Constant, "({n},{m})");
    }
}

#[test]
fn not_spread_case_grows() {
    let (a, c) = ratio(7, 3);
    let s = dyadic(a, &c, 10, 24);
    let at = |e: u32| s.max_disc[(e - 10) as usize];
    assert!(at(24) > 10.0 * at(12));
    let fit = growth_fit(&s).unwrap();
    assert_eq!(fit.best, GrowthModel::PowerLaw);
    let roots = find_roots(&f_alpha_poly(7, 3).unwrap()).unwrap();
    let predicted = roots[1].modulus.ln() / roots[0].modulus.ln();
    assert!(
        (fit.exponent - predicted).abs() < 0.1,
        "{} vs {predicted}",
        fit.exponent
    );
    assert!(fit.heuristic);
}

#[test]
fn incommensurable_case_grows() {
    let (a, c) = third();
    let s = dyadic(a, &c, 10, 24);
    assert!(s.max_disc.windows(2).all(|w| w[0] < w[1]));
    let fit = growth_fit(&s).unwrap();
    assert!(fit.residual_ratio(GrowthModel::Constant, GrowthModel::WOverLogW) > 10.0);
    assert!(fit.linear_w_over_log_w.0 > 0.0);
    assert!(loglog_svg(&s, Some("a <b>")).contains("<desc>a &lt;b&gt;</desc>"));
}

#[test]
fn growth_fit_needs_data() {
    let s = dyadic(0.5, &RatioClass::Commensurable { n: 1, m: 1 }, 4, 10);
    assert!(growth_fit(&s).is_err());
    let s = dyadic(0.5, &RatioClass::Commensurable { n: 1, m: 1 }, 4, 16);
    let fit = growth_fit(&s).unwrap();
    assert_eq!(fit.best, GrowthModel::Constant);
    assert!(fit.heuristic);
    let s = discrepancy_scan(
        0.5,
        &RatioClass::Commensurable { n: 1, m: 1 },
        8.0,
        &ScanOptions::new(Grid::Explicit {
            windows: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 40.0],
        }),
    )
    .unwrap();
    assert!(growth_fit(&s).is_err());
}

#[test]
fn grid_validation() {
    assert!(Grid::Explicit { windows: vec![] }.windows().is_err());
    assert!(Grid::Explicit {
        windows: vec![2.0, 1.0]
    }
    .windows()
    .is_err());
    assert!(Grid::Explicit {
        windows: vec![-1.0]
    }
    .windows()
    .is_err());
    assert!(Grid::Dyadic {
        min_exp: 5,
        max_exp: 4
    }
    .windows()
    .is_err());
    assert_eq!(
        Grid::Dyadic {
            min_exp: 0,
            max_exp: 2
        }
        .windows()
        .unwrap(),
        vec![1.0, 2.0, 4.0]
    );
}

#[test]
fn sampling_agrees_with_exhaustive_scan() {
    let (a, c) = ratio(3, 2);
    let grid = Grid::Dyadic {
        min_exp: 4,
        max_exp: 16,
    };
    let full = discrepancy_scan(a, &c, 16.0 * LN2, &ScanOptions::new(grid.clone())).unwrap();
    let sampled = discrepancy_scan(
        a,
        &c,
        16.0 * LN2,
        &ScanOptions {
            exhaustive_limit: 2000,
            samples_per_window: 1 << 14,
            ..ScanOptions::new(grid)
        },
    )
    .unwrap();
    assert!(sampled.coverage.sampled_windows > 0);
    for (s, f) in sampled.max_disc.iter().zip(&full.max_disc) {
        assert!(s <= f && *s > 0.8 * f, "{s} vs {f}");
    }
}

fn alpha_t() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..0.5, 0.5f64..10.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prefix_matches_brute_force((alpha, t) in alpha_t(), fracs in prop::collection::vec(0.0f64..=1.0, 1..20)) {
        let p = KakutaniRule::new(alpha).unwrap().patch(FlowTime::Real(t), 1 << 20).unwrap();
        let top = t.exp();
        let mut last = BigUint::default();
        let pos: Vec<f64> = (0..p.len()).map(|i| p.real_position(i)).collect();
        let mut xs: Vec<f64> = fracs.iter().map(|f| f * top).collect();
        xs.sort_by(f64::total_cmp);
        for x in xs {
            let c = prefix_count(alpha, t, x).unwrap();
            let want = pos.iter().filter(|&&y| y <= x + 1e-9 * x.max(1.0)).count();
            prop_assert_eq!(c.clone(), BigUint::from(want));
            prop_assert!(c >= last);
            last = c;
        }
        prop_assert_eq!(prefix_count(alpha, t, top).unwrap(), BigUint::from(p.len()));
        // Boundary-aligned differences count the points in (y, x].
        if p.len() > 3 {
            let (i, j) = (1, p.len() - 2);
            let y = p.real_position(i);
            let x = p.real_position(j);
            let diff = prefix_count(alpha, t, x).unwrap() - prefix_count(alpha, t, y).unwrap();
            prop_assert_eq!(diff, BigUint::from(j - i));
        }
    }

    #[test]
    fn scan_invariants((alpha, t) in alpha_t()) {
        let class = RatioClass::Incommensurable { r: alpha.ln() / (1.0 - alpha).ln() };
        let top = t.exp();
        let windows: Vec<f64> = (1..=8).map(|k| top * k as f64 / 8.0).collect();
        let opts = ScanOptions { two_sided: true, ..ScanOptions::new(Grid::Explicit { windows: windows.clone() }) };
        let s = discrepancy_scan(alpha, &class, t, &opts).unwrap();
        prop_assert!(s.max_disc.windows(2).all(|w| w[0] <= w[1]));
        let d = s.density.value;
        let counter = PrefixCounter::new(&KakutaniRule::new(alpha).unwrap().horizon(FlowTime::Real(t)).unwrap());
        let two = s.two_sided.as_ref().unwrap();
        for (k, &w) in windows.iter().enumerate() {
            let n = counter.count_upto(w).unwrap().to_f64().unwrap();
            prop_assert!((n / w - d).abs() <= s.max_disc[k] / w + 1e-9);
            prop_assert!(two[k] <= 2.0 * s.max_disc[k] + 1e-9);
        }
    }
}
