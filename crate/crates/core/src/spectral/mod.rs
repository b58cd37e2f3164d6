//! Spectral spreadness verdicts.
//!
//! A primitive substitution Delone set in ℝ is uniformly spread when the
//! first eigenvalue λ_ℓ (ℓ ≥ 2) whose eigenspace is not perpendicular to 𝟏
//! lies strictly inside the unit disk, and is not spread when it lies
//! strictly outside. On the circle the criterion says nothing, so those cases
//! come back as [`Verdict::Boundary`]. Closeness to the circle is decided by
//! exact cyclotomic division, never by floating point alone.

mod linalg;
mod roots;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cover::{
    build_rho, build_three_interval_rule, char_poly, substitution_matrix, SubstitutionMatrix,
};
use crate::error::{param, Result};
use crate::params::{self, AlphaParam, RatioClass};
use crate::poly::{cyclotomic, IntPolynomial};

pub use linalg::{
    eigenspace, eigenspace_not_perp, null_space, perron_vectors, PERP_TOLERANCE, RANK_TOLERANCE,
};
pub use roots::{find_roots, residual_bound, Root};

/// Width of the band around the unit circle handed to the exact test.
pub const CIRCLE_DELTA: f64 = 1e-9;
pub const DEFAULT_CYCLOTOMIC_BOUND: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Spread,
    NotSpread,
    Boundary,
}

impl Verdict {
    /// Shell exit code: 0 spread, 1 not spread, 2 boundary.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Spread => 0,
            Verdict::NotSpread => 1,
            Verdict::Boundary => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Spread => "Spread",
            Verdict::NotSpread => "NotSpread",
            Verdict::Boundary => "Boundary",
        })
    }
}

/// x^n − x^{n−m} − 1.
pub fn f_alpha_poly(n: u32, m: u32) -> Result<IntPolynomial> {
    params::validate_ratio(n, m)?;
    if n == m {
        return param("f_alpha needs n > m");
    }
    Ok(IntPolynomial::from_terms(&[
        (1, n as usize),
        (-1, (n - m) as usize),
        (-1, 0),
    ]))
}

/// Indices j ≤ bound with Φ_j | p. For x^a − x^b − 1 only Φ_6 can divide, so
/// only Φ_6 is tried.
pub fn unit_circle_factors(p: &IntPolynomial, bound: u32) -> Vec<u32> {
    let (_, q) = p.strip_x_power();
    if q.as_kakutani_trinomial().is_some() {
        return if q.is_divisible_by(&cyclotomic(6)) {
            vec![6]
        } else {
            vec![]
        };
    }
    (1..=bound)
        .filter(|&j| q.is_divisible_by(&cyclotomic(j)))
        .collect()
}

pub fn has_unit_circle_factor(p: &IntPolynomial) -> bool {
    !unit_circle_factors(p, DEFAULT_CYCLOTOMIC_BOUND).is_empty()
}

pub fn is_pv_trinomial(n: u32, m: u32) -> Result<bool> {
    f_alpha_poly(n, m)?;
    Ok(matches!((n, m), (2, 1) | (3, 2) | (3, 1) | (4, 1)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub char_poly: IntPolynomial,
    /// Power of x split off the characteristic polynomial.
    pub zero_multiplicity: usize,
    /// The characteristic polynomial without its x-power; its roots are the
    /// nonzero eigenvalues.
    pub reduced_poly: IntPolynomial,
    /// Nonzero eigenvalues by decreasing modulus.
    pub roots: Vec<Root>,
    pub lambda1: f64,
    pub lambda2_modulus: f64,
    pub has_unit_modulus_eigenvalue: bool,
    pub unit_circle_factors: Vec<u32>,
    /// Quotient after removing the unit-circle factors, when there are any.
    pub unit_free_part: Option<IntPolynomial>,
    /// 1-based index of the first eigenvalue after λ₁ whose eigenspace is not
    /// perpendicular to 𝟏; absent if there is none.
    pub ell: Option<usize>,
    pub lambda_ell_modulus: f64,
    pub solomon: Verdict,
    /// Within the band around the circle but with no exact factor found.
    pub unresolved: bool,
}

pub fn solomon_verdict(mat: &SubstitutionMatrix) -> Result<SpectralReport> {
    solomon_verdict_with(mat, DEFAULT_CYCLOTOMIC_BOUND)
}

pub fn solomon_verdict_with(
    mat: &SubstitutionMatrix,
    cyclotomic_bound: u32,
) -> Result<SpectralReport> {
    if !mat.is_primitive() {
        return param("the substitution matrix is not primitive");
    }
    let char_poly = char_poly(mat);
    let (zero_multiplicity, reduced_poly) = char_poly.strip_x_power();
    let roots = find_roots(&reduced_poly)?;
    let lambda1 = roots[0].re;
    let lambda2_modulus = roots.get(1).map_or(0.0, |r| r.modulus);

    let unit_circle_factors = unit_circle_factors(&reduced_poly, cyclotomic_bound);
    let has_unit = !unit_circle_factors.is_empty();
    let unit_free_part = has_unit.then(|| {
        unit_circle_factors
            .iter()
            .fold(reduced_poly.clone(), |p, &j| {
                let phi = cyclotomic(j);
                let mut p = p;
                while let Some((q, _)) = p.div_rem(&phi).filter(|(_, r)| r.is_zero()) {
                    p = q;
                }
                p
            })
    });

    let mut ell = None;
    for (i, r) in roots.iter().enumerate().skip(1) {
        if eigenspace_not_perp(mat, r.z())? {
            ell = Some(i + 1);
            break;
        }
    }
    let mu = ell.map_or(0.0, |l| roots[l - 1].modulus);
    let (solomon, unresolved) = if mu > 1.0 + CIRCLE_DELTA {
        (Verdict::NotSpread, false)
    } else if (mu - 1.0).abs() <= CIRCLE_DELTA {
        (Verdict::Boundary, !has_unit)
    } else if has_unit {
        (Verdict::Boundary, false)
    } else {
        (Verdict::Spread, false)
    };

    Ok(SpectralReport {
        char_poly,
        zero_multiplicity,
        reduced_poly,
        roots,
        lambda1,
        lambda2_modulus,
        has_unit_modulus_eigenvalue: has_unit,
        unit_circle_factors,
        unit_free_part,
        ell,
        lambda_ell_modulus: mu,
        solomon,
        unresolved,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// α = 1/2: every tile has length 1.
    Lattice,
    /// Discrepancy grows like |U|/log|U| on some intervals.
    IncommensurableDiscrepancy,
    SecondEigenvalueInside,
    SecondEigenvalueOutside,
    UnitCircleFactor,
    NumericallyUnresolved,
}

/// How the spectral verdict compares with the five-value list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossCheck {
    Agree,
    Mismatch,
    /// The spectral test is inconclusive here; flagged, not coerced.
    Boundary,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadVerdict {
    pub class: RatioClass,
    pub alpha: f64,
    /// r_α ∈ {1, 3/2, 2, 3, 4}.
    pub theorem_verdict: bool,
    pub spectral: Option<SpectralReport>,
    pub reason: Reason,
    pub cross_check: CrossCheck,
}

impl SpreadVerdict {
    pub fn verdict(&self) -> Verdict {
        match &self.spectral {
            Some(s) => s.solomon,
            None if self.theorem_verdict => Verdict::Spread,
            None => Verdict::NotSpread,
        }
    }

    /// Flat record: {n, m, r, alpha, lambda1, lambda2_modulus,
    /// unit_circle_factor, ell, solomon, theorem_verdict, reason}.
    pub fn record(&self) -> Value {
        let (n, m) = match self.class {
            RatioClass::Commensurable { n, m } => (Some(n), Some(m)),
            RatioClass::Incommensurable { .. } => (None, None),
        };
        let s = self.spectral.as_ref();
        json!({
            "n": n,
            "m": m,
            "r": self.class.r(),
            "alpha": self.alpha,
            "lambda1": s.map(|s| s.lambda1),
            "lambda2_modulus": s.map(|s| s.lambda2_modulus),
            "unit_circle_factor": s.map(|s| s.has_unit_modulus_eigenvalue),
            "ell": s.and_then(|s| s.ell),
            "solomon": s.map(|s| s.solomon),
            "theorem_verdict": self.theorem_verdict,
            "reason": self.reason,
        })
    }
}

pub fn in_theorem_set(n: u32, m: u32) -> bool {
    matches!((n, m), (1, 1) | (3, 2) | (2, 1) | (3, 1) | (4, 1))
}

fn reason_for(report: &SpectralReport) -> Reason {
    match (report.solomon, report.unresolved) {
        (Verdict::Spread, _) => Reason::SecondEigenvalueInside,
        (Verdict::NotSpread, _) => Reason::SecondEigenvalueOutside,
        (Verdict::Boundary, false) => Reason::UnitCircleFactor,
        (Verdict::Boundary, true) => Reason::NumericallyUnresolved,
    }
}

fn cross_check(spectral: Verdict, theorem: bool) -> CrossCheck {
    match (spectral, theorem) {
        (Verdict::Boundary, _) => CrossCheck::Boundary,
        (Verdict::Spread, true) | (Verdict::NotSpread, false) => CrossCheck::Agree,
        _ => CrossCheck::Mismatch,
    }
}

pub fn classify_spreadness(class: &RatioClass) -> Result<SpreadVerdict> {
    match *class {
        RatioClass::Incommensurable { r } => {
            if !(r.is_finite() && r >= 1.0) {
                return param(format!("r must be at least 1, got {r}"));
            }
            Ok(SpreadVerdict {
                class: *class,
                alpha: alpha_of_ratio(r),
                theorem_verdict: false,
                spectral: None,
                reason: Reason::IncommensurableDiscrepancy,
                cross_check: CrossCheck::NotApplicable,
            })
        }
        RatioClass::Commensurable { n: 1, m: 1 } => {
            // Every tile is a unit tile; the 1×1 matrix [2] has no second eigenvalue.
            let report = solomon_verdict(&SubstitutionMatrix::new(vec![vec![2]]))?;
            Ok(SpreadVerdict {
                class: *class,
                alpha: 0.5,
                theorem_verdict: true,
                cross_check: cross_check(report.solomon, true),
                spectral: Some(report),
                reason: Reason::Lattice,
            })
        }
        RatioClass::Commensurable { n, m } => {
            let alpha = params::solve_alpha(n, m)?;
            let report = solomon_verdict(&substitution_matrix(&build_rho(n, m)?))?;
            let theorem = in_theorem_set(n, m);
            Ok(SpreadVerdict {
                class: *class,
                alpha,
                theorem_verdict: theorem,
                reason: reason_for(&report),
                cross_check: cross_check(report.solomon, theorem),
                spectral: Some(report),
            })
        }
    }
}

/// Detects the ratio class of α heuristically, then classifies.
pub fn classify_alpha(alpha: f64, max_denominator: u32) -> Result<SpreadVerdict> {
    let a = AlphaParam::normalized(alpha)?;
    let class = params::detect_commensurability(&a, max_denominator)?;
    let mut v = classify_spreadness(&class)?;
    if let RatioClass::Incommensurable { .. } = class {
        v.alpha = a.value();
    }
    Ok(v)
}

/// α ∈ (0, 1/2] with log α / log(1−α) = r, by bisection.
fn alpha_of_ratio(r: f64) -> f64 {
    let g = |x: f64| x.ln() - r * (1.0 - x).ln();
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Which of the known PV families a three-loop polynomial belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PvFamily {
    /// x^5 − x^4 − x^2 − 1.
    Sporadic,
    /// x^d − 2x^{d−1} − 1.
    DoubleSubleading { d: u32 },
    /// x^d − x^{d−1} − x^{d−2} − 1, d odd.
    OddTribonacci { d: u32 },
}

pub fn pv_family(f: &IntPolynomial) -> Option<PvFamily> {
    let d = f.degree();
    if *f == IntPolynomial::from_terms(&[(1, 5), (-1, 4), (-1, 2), (-1, 0)]) {
        return Some(PvFamily::Sporadic);
    }
    if d >= 1 && *f == IntPolynomial::from_terms(&[(1, d), (-2, d - 1), (-1, 0)]) {
        return Some(PvFamily::DoubleSubleading { d: d as u32 });
    }
    if d >= 3
        && d % 2 == 1
        && *f == IntPolynomial::from_terms(&[(1, d), (-1, d - 1), (-1, d - 2), (-1, 0)])
    {
        return Some(PvFamily::OddTribonacci { d: d as u32 });
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeIntervalVerdict {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub f: IntPolynomial,
    pub lengths: [f64; 3],
    pub pv_family: Option<PvFamily>,
    /// Spread by list membership alone.
    pub list_verdict: Verdict,
    pub spectral: SpectralReport,
    /// Whether the characteristic polynomial is exactly x^s·f.
    pub spectrum_matches_f: bool,
    /// Residual of log-lengths ∝ (n, m, k), which the rule satisfies.
    pub proportional_residual: f64,
    /// Residual of α^k = β^m = (1−α−β)^n for the same lengths.
    pub power_relation_residual: f64,
    pub cross_check: CrossCheck,
}

impl ThreeIntervalVerdict {
    pub fn verdict(&self) -> Verdict {
        if self.pv_family.is_some() {
            Verdict::Spread
        } else {
            self.spectral.solomon
        }
    }
}

pub fn classify_three_interval(n: u32, m: u32, k: u32) -> Result<ThreeIntervalVerdict> {
    let rule = build_three_interval_rule(n, m, k)?;
    let mat = substitution_matrix(&rule.rule);
    let spectral = solomon_verdict(&mat)?;
    let family = pv_family(&rule.f);
    let list_verdict = if family.is_some() {
        Verdict::Spread
    } else {
        Verdict::NotSpread
    };
    let cc = match (family.is_some(), spectral.solomon) {
        (_, Verdict::Boundary) => CrossCheck::Boundary,
        (true, Verdict::Spread) => CrossCheck::Agree,
        (true, _) => CrossCheck::Mismatch,
        (false, _) => CrossCheck::NotApplicable,
    };
    Ok(ThreeIntervalVerdict {
        n,
        m,
        k,
        spectrum_matches_f: spectral.reduced_poly == rule.f,
        f: rule.f,
        lengths: rule.lengths,
        pv_family: family,
        list_verdict,
        spectral,
        proportional_residual: rule.proportional_residual,
        power_relation_residual: rule.power_relation_residual,
        cross_check: cc,
    })
}
