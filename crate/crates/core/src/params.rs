//! Parameter arithmetic: α, the ratio r_α = log α / log(1−α), and exact
//! tile-length exponents.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Default tolerance for commensurability residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;

/// The parameter α, normalised so that `0 < α ≤ 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaParam {
    value: f64,
    tolerance: f64,
}

impl AlphaParam {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value <= 0.5) {
            return param(format!("alpha must lie in (0, 1/2], got {value}"));
        }
        Ok(Self {
            value,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Accepts any α in (0,1) and keeps min{α, 1−α}.
    pub fn normalized(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return param(format!("alpha must lie in (0, 1), got {value}"));
        }
        Self::new(value.min(1.0 - value))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return param(format!("tolerance must be positive, got {tolerance}"));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn ratio(&self) -> f64 {
        (self.value.ln()) / (1.0 - self.value).ln()
    }
}

/// Arithmetic class of r_α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RatioClass {
    /// r_α = n/m with gcd(n, m) = 1 and n ≥ m.
    Commensurable { n: u32, m: u32 },
    /// No rational n/m below the search bound matched.
    Incommensurable { r: f64 },
}

impl RatioClass {
    pub fn commensurable(n: u32, m: u32) -> Result<Self> {
        validate_ratio(n, m)?;
        Ok(RatioClass::Commensurable { n, m })
    }

    pub fn r(&self) -> f64 {
        match *self {
            RatioClass::Commensurable { n, m } => n as f64 / m as f64,
            RatioClass::Incommensurable { r } => r,
        }
    }
}

impl fmt::Display for RatioClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioClass::Commensurable { n, m } => write!(f, "{n}/{m}"),
            RatioClass::Incommensurable { r } => write!(f, "irrational ~{r}"),
        }
    }
}

pub(crate) fn validate_ratio(n: u32, m: u32) -> Result<()> {
    if n == 0 || m == 0 {
        return param(format!("n and m must be positive, got {n}/{m}"));
    }
    if n < m {
        return param(format!("expected n >= m, got {n}/{m}"));
    }
    if n.gcd(&m) != 1 {
        return param(format!("n and m must be coprime, got {n}/{m}"));
    }
    Ok(())
}

/// Exact tile length α^a · (1−α)^b.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct LengthExponent {
    pub a: u32,
    pub b: u32,
}

impl LengthExponent {
    pub const UNIT: LengthExponent = LengthExponent { a: 0, b: 0 };

    pub const fn new(a: u32, b: u32) -> Self {
        Self { a, b }
    }

    /// Left piece of the split: the copy scaled by α.
    pub const fn alpha_child(self) -> Self {
        Self::new(self.a + 1, self.b)
    }

    /// Right piece of the split: the copy scaled by 1−α.
    pub const fn complement_child(self) -> Self {
        Self::new(self.a, self.b + 1)
    }

    pub fn value(self, alpha: f64) -> f64 {
        length_value(self, alpha)
    }
}

impl fmt::Display for LengthExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{}(1-a)^{}", self.a, self.b)
    }
}

pub fn length_value(e: LengthExponent, alpha: f64) -> f64 {
    alpha.powi(e.a as i32) * (1.0 - alpha).powi(e.b as i32)
}

/// Unique α ∈ (0, 1/2] with α^m = (1−α)^n, by bisection on
/// m·log α − n·log(1−α), which is increasing in α.
pub fn solve_alpha(n: u32, m: u32) -> Result<f64> {
    validate_ratio(n, m)?;
    if n == m {
        return Ok(0.5);
    }
    let (nf, mf) = (n as f64, m as f64);
    let g = |x: f64| mf * x.ln() - nf * (1.0 - x).ln();
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    let residual = (alpha.powi(m as i32) - (1.0 - alpha).powi(n as i32)).abs();
    if residual >= 1e-14 {
        return Err(Error::Numeric(format!(
            "bisection for {n}/{m} stalled with residual {residual:e}"
        )));
    }
    Ok(alpha)
}

pub fn r_of_alpha(alpha: f64) -> Result<f64> {
    Ok(AlphaParam::new(alpha)?.ratio())
}

/// Relative commensurability residual |1 − (1−α)^n / α^m|.
///
/// The absolute residual |α^m − (1−α)^n| underflows to zero for large m, so
/// it cannot reject anything at the denominators we scan.
pub fn commensurability_residual(alpha: f64, n: u32, m: u32) -> f64 {
    (n as f64 * (1.0 - alpha).ln() - m as f64 * alpha.ln())
        .exp_m1()
        .abs()
}

/// Bounded search for r_α = n/m among the continued-fraction convergents of
/// r_α with denominator at most `max_denominator`.
///
/// This is a heuristic: a float cannot certify that r_α is irrational.
pub fn detect_commensurability(alpha: &AlphaParam, max_denominator: u32) -> Result<RatioClass> {
    if max_denominator == 0 {
        return param("max_denominator must be positive");
    }
    let r = alpha.ratio();
    for (n, m) in convergents(r, max_denominator as u64) {
        let (Ok(n), Ok(m)) = (u32::try_from(n), u32::try_from(m)) else {
            break;
        };
        if n >= m && commensurability_residual(alpha.value(), n, m) < alpha.tolerance() {
            return Ok(RatioClass::Commensurable { n, m });
        }
    }
    Ok(RatioClass::Incommensurable { r })
}

/// Continued-fraction convergents p/q of a positive real, q ≤ max_q.
pub(crate) fn convergents(x: f64, max_q: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let (mut p_prev, mut p) = (1u64, x.floor() as u64);
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut frac = x - x.floor();
    out.push((p, q));
    for _ in 0..64 {
        if frac < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !a.is_finite() || a > 1e15 {
            break;
        }
        let a = a as u64;
        frac = inv - inv.floor();
        let Some(p_next) = a.checked_mul(p).and_then(|v| v.checked_add(p_prev)) else {
            break;
        };
        let Some(q_next) = a.checked_mul(q).and_then(|v| v.checked_add(q_prev)) else {
            break;
        };
        if q_next > max_q {
            break;
        }
        (p_prev, p, q_prev, q) = (p, p_next, q, q_next);
        out.push((p, q));
    }
    out
}
