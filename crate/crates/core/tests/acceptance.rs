//! One PASS/FAIL line per acceptance criterion; run with `--nocapture` to see them.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use kakutani::cover::{
    build_rho, char_poly, iterate_primitive, substitution_matrix, tile_counts, verify_cover,
};
use kakutani::discrepancy::{discrepancy_scan, growth_fit, Grid, GrowthModel, ScanOptions};
use kakutani::engine::{chabauty_fell_distance, FlowTime, KakutaniRule, PointSet};
use kakutani::params::{solve_alpha, RatioClass};
use kakutani::poly::IntPolynomial;
use kakutani::spectral::{
    classify_spreadness, classify_three_interval, eigenspace_not_perp, f_alpha_poly, find_roots,
    Verdict,
};
use num_bigint::BigUint;
use num_complex::Complex64;

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    f()?;
    let el = start.elapsed();
    ensure!(el < limit, "took {el:?}, limit {limit:?}");
    Ok(())
}

fn survey() -> Check {
    timed(Duration::from_secs(10), || {
        let out = Command::new(env!("CARGO_BIN_EXE_kakutani"))
            .args(["survey", "--max-n", "12"])
            .env_remove("KAKUTANI_MAX_TILES")
            .env_remove("KAKUTANI_SURVEY_LIMIT")
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.success(), "exit {:?}", out.status.code());
        let v: serde_json::Value =
            serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let rows = v["result"]["rows"].as_array().ok_or("no rows")?;
        let spread: Vec<(u64, u64)> = rows
            .iter()
            .filter(|r| r["solomon"] == "Spread")
            .map(|r| (r["n"].as_u64().unwrap(), r["m"].as_u64().unwrap()))
            .collect();
        let want = vec![(1, 1), (2, 1), (3, 1), (3, 2), (4, 1)];
        ensure!(spread == want, "spread rows {spread:?}");
        ensure!(
            rows.len() == common::coprime_pairs(12).len() + 1,
            "{} rows",
            rows.len()
        );
        Ok(())
    })
}

fn char_poly_identity() -> Check {
    for (n, m) in common::coprime_pairs(10) {
        let p = char_poly(&substitution_matrix(
            &build_rho(n, m).map_err(|e| e.to_string())?,
        ));
        let k = (n + m - 1) as usize;
        let want = IntPolynomial::from_terms(&[(1, k), (-1, m as usize - 1), (-1, n as usize - 1)]);
        ensure!(p == want, "({n},{m}) gave {p:?}");
    }
    Ok(())
}

fn cover() -> Check {
    timed(Duration::from_secs(60), || {
        for (n, m) in common::coprime_pairs(6) {
            for ell in 0..=12 {
                let r = verify_cover(n, m, ell, 1 << 24).map_err(|e| e.to_string())?;
                ensure!(r.agree && r.right_ends_agree, "({n},{m}) ell={ell}: {r:?}");
            }
        }
        Ok(())
    })
}

fn pv_constants() -> Check {
    let supergolden = common::bisect(|x| x * x * x - x * x - 1.0, 1.0, 2.0);
    let cases = [
        ((3, 2), 1.3247, 0.43016),
        ((2, 1), (1.0 + 5f64.sqrt()) / 2.0, 0.38196),
        ((3, 1), supergolden, 0.31767),
        ((4, 1), 1.3803, 0.27551),
    ];
    for ((n, m), lam, alpha) in cases {
        let v =
            classify_spreadness(&RatioClass::Commensurable { n, m }).map_err(|e| e.to_string())?;
        let l1 = v.spectral.as_ref().ok_or("no spectrum")?.lambda1;
        let oracle = common::perron_oracle(n, m);
        ensure!((l1 - oracle).abs() < 1e-9, "({n},{m}) λ1 {l1} vs {oracle}");
        ensure!((l1 - lam).abs() < 1e-4, "({n},{m}) λ1 {l1} vs {lam}");
        ensure!((v.alpha - alpha).abs() < 1e-5, "({n},{m}) α {}", v.alpha);
    }
    ensure!(
        (common::perron_oracle(3, 1) - supergolden).abs() < 1e-12,
        "supergolden"
    );
    Ok(())
}

fn boundary() -> Check {
    let f = f_alpha_poly(5, 1).map_err(|e| e.to_string())?;
    let (q, r) = f
        .div_rem(&IntPolynomial::from_i64(&[1, -1, 1]))
        .ok_or("division failed")?;
    ensure!(r.is_zero(), "remainder {r:?}");
    ensure!(
        q == IntPolynomial::from_i64(&[-1, -1, 0, 1]),
        "quotient {q:?}"
    );
    let v = classify_spreadness(&RatioClass::Commensurable { n: 5, m: 1 })
        .map_err(|e| e.to_string())?;
    ensure!(
        v.verdict() == Verdict::Boundary,
        "verdict {:?}",
        v.verdict()
    );
    Ok(())
}

fn counting() -> Check {
    for (n, m) in common::coprime_pairs(5) {
        let rule = build_rho(n, m).map_err(|e| e.to_string())?;
        let mat = substitution_matrix(&rule);
        let flow = KakutaniRule::commensurable(n, m).map_err(|e| e.to_string())?;
        for ell in 0..=15 {
            let total: BigUint = tile_counts(&mat, ell).into_iter().sum();
            let walks = flow
                .count_tiles(FlowTime::Steps(ell))
                .map_err(|e| e.to_string())?;
            let patch = flow
                .patch(FlowTime::Steps(ell), 1 << 22)
                .map_err(|e| e.to_string())?;
            let labelled = iterate_primitive(&rule, ell, 1 << 22).map_err(|e| e.to_string())?;
            ensure!(total == walks, "({n},{m}) ell={ell}: {total} vs {walks}");
            ensure!(
                total == BigUint::from(patch.len()),
                "({n},{m}) ell={ell}: patch {}",
                patch.len()
            );
            ensure!(
                total == BigUint::from(labelled.len()),
                "({n},{m}) ell={ell}: labelled"
            );
        }
    }
    Ok(())
}

const GOLDEN: [((u32, u32), f64); 2] = [((2, 1), 1.2763932022500213), ((3, 2), 1.621657520532608)];

fn dyadic(
    alpha: f64,
    class: &RatioClass,
    hi: u32,
) -> std::result::Result<kakutani::discrepancy::DiscrepancySeries, String> {
    let opts = ScanOptions::new(Grid::Dyadic {
        min_exp: 10,
        max_exp: hi,
    });
    discrepancy_scan(alpha, class, hi as f64 * std::f64::consts::LN_2, &opts)
        .map_err(|e| e.to_string())
}

fn discrepancy() -> Check {
    timed(Duration::from_secs(300), || {
        for ((n, m), golden) in GOLDEN {
            let a = solve_alpha(n, m).map_err(|e| e.to_string())?;
            let s = dyadic(a, &RatioClass::Commensurable { n, m }, 24)?;
            let top = s.max_disc.iter().cloned().fold(0.0, f64::max);
            ensure!(
                top <= golden + 1e-6,
                "({n},{m}) max_disc {top} above {golden}"
            );
        }
        let a = solve_alpha(7, 3).map_err(|e| e.to_string())?;
        let s = dyadic(a, &RatioClass::Commensurable { n: 7, m: 3 }, 24)?;
        let (d12, d24) = (s.max_disc[2], s.max_disc[14]);
        ensure!(d24 > 10.0 * d12, "(7,3) {d24} vs 10·{d12}");
        let s = dyadic(
            1.0 / 3.0,
            &RatioClass::Incommensurable {
                r: 3f64.ln() / 1.5f64.ln(),
            },
            24,
        )?;
        let fit = growth_fit(&s).map_err(|e| e.to_string())?;
        let ratio = fit.residual_ratio(GrowthModel::Constant, GrowthModel::WOverLogW);
        ensure!(ratio > 10.0, "alpha=1/3 residual ratio {ratio}");
        Ok(())
    })
}

fn eigenvectors() -> Check {
    for (n, m) in common::coprime_pairs(10) {
        let mat = substitution_matrix(&build_rho(n, m).map_err(|e| e.to_string())?);
        for z in find_roots(&f_alpha_poly(n, m).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
        {
            let ok = eigenspace_not_perp(&mat, z.z()).map_err(|e| e.to_string())?;
            ensure!(ok, "({n},{m}) eigenvalue {:?} perpendicular", z.z());
        }
    }
    Ok(())
}

fn spectrum_matches(got: &[Complex64], want: &[Complex64]) -> Check {
    ensure!(
        got.len() == want.len(),
        "{} eigenvalues, want {}",
        got.len(),
        want.len()
    );
    for w in want {
        ensure!(
            got.iter().any(|g| (g - w).norm() < 1e-9),
            "missing root {w}"
        );
    }
    Ok(())
}

fn three_interval() -> Check {
    let nonzero = |n, m, k| -> std::result::Result<Vec<Complex64>, String> {
        let v = classify_three_interval(n, m, k).map_err(|e| e.to_string())?;
        ensure!(
            v.verdict() == Verdict::Spread,
            "({n},{m},{k}) verdict {:?}",
            v.verdict()
        );
        ensure!(v.pv_family.is_some(), "({n},{m},{k}) not in a PV family");
        Ok(v.spectral.roots.iter().map(|r| r.z()).collect())
    };
    let s2 = 2f64.sqrt();
    spectrum_matches(
        &nonzero(2, 1, 1)?,
        &[Complex64::new(1.0 + s2, 0.0), Complex64::new(1.0 - s2, 0.0)],
    )?;
    // Tribonacci: the other two roots have sum 1 − τ and product 1/τ.
    let tau = common::bisect(|x| x * x * x - x * x - x - 1.0, 1.0, 2.0);
    let (b, c) = (1.0 - tau, 1.0 / tau);
    let im = (4.0 * c - b * b).sqrt() / 2.0;
    let want = [
        Complex64::new(tau, 0.0),
        Complex64::new(b / 2.0, im),
        Complex64::new(b / 2.0, -im),
    ];
    spectrum_matches(&nonzero(3, 2, 1)?, &want)
}

fn metric() -> Check {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut set = || {
        let k = 1 + (next() * 12.0) as usize;
        let pts: Vec<f64> = (0..k).map(|_| (next() - 0.5) * 40.0).collect();
        PointSet::from_unsorted(pts, (f64::NEG_INFINITY, f64::INFINITY)).unwrap()
    };
    for i in 0..1000 {
        let (a, b, c) = (set(), set(), set());
        let d = |x: &PointSet, y: &PointSet| chabauty_fell_distance(x, y).value;
        ensure!(d(&a, &a) == 0.0, "triple {i}: identity");
        ensure!(d(&a, &b) == d(&b, &a), "triple {i}: symmetry");
        ensure!(
            d(&a, &b) <= d(&a, &c) + d(&c, &b) + 1e-12,
            "triple {i}: triangle"
        );
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("survey spread set", survey),
        ("characteristic polynomial identity", char_poly_identity),
        ("cover verification", cover),
        ("pv constants", pv_constants),
        ("boundary detection", boundary),
        ("counting consistency", counting),
        ("discrepancy dichotomy", discrepancy),
        ("eigenvectors not perpendicular", eigenvectors),
        ("three-interval spot checks", three_interval),
        ("chabauty-fell metric", metric),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(e) => {
                println!("FAIL {:>2} {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
