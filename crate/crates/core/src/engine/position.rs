use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::params::LengthExponent;

/// A position Σ c·α^a(1−α)^b with non-negative integer coefficients, measured
/// in units of the patch scale from the patch's left end.
///
/// Distinct maps may denote the same real number (α + (1−α) = 1), so exact
/// comparison goes through [`ExactPosition::canonical`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ExactPosition {
    terms: BTreeMap<LengthExponent, u64>,
}

impl ExactPosition {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn of(e: LengthExponent) -> Self {
        let mut p = Self::zero();
        p.add_term(e, 1);
        p
    }

    pub fn add_term(&mut self, e: LengthExponent, count: u64) {
        if count > 0 {
            *self.terms.entry(e).or_insert(0) += count;
        }
    }

    pub fn plus(&self, e: LengthExponent) -> Self {
        let mut p = self.clone();
        p.add_term(e, 1);
        p
    }

    pub fn add(&mut self, other: &ExactPosition) {
        for (&e, &c) in &other.terms {
            self.add_term(e, c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (LengthExponent, u64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value(&self, alpha: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| c as f64 * e.value(alpha))
            .sum()
    }

    /// Normal form in ℤ[α]: coefficients of 1, α, α², … after expanding
    /// (1−α)^b binomially. Two positions with equal normal forms are equal for
    /// every α.
    pub fn canonical(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = Vec::new();
        for (e, &c) in &self.terms {
            let top = (e.a + e.b) as usize;
            if out.len() <= top {
                out.resize(top + 1, BigInt::zero());
            }
            let mut binom = BigInt::from(1u32);
            for i in 0..=e.b {
                let term = &binom * c;
                let slot = &mut out[(e.a + i) as usize];
                if i % 2 == 0 {
                    *slot += term;
                } else {
                    *slot -= term;
                }
                binom = binom * (e.b - i) / (i + 1);
            }
        }
        while out.last().is_some_and(Zero::is_zero) {
            out.pop();
        }
        out
    }

    pub fn exactly_equals(&self, other: &ExactPosition) -> bool {
        self == other || self.canonical() == other.canonical()
    }
}

impl fmt::Display for ExactPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}*{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for ExactPosition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(e, c)| (e.a, e.b, *c)))
    }
}

/// A position Σ c_k·θ^k where θ = ξ^{-1} is the contraction of a fixed-scale
/// rule. Used for labelled patches, whose tile lengths are all powers of θ.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct PowerSum {
    coeffs: Vec<u64>,
}

impl PowerSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_power(&mut self, k: u32, count: u64) {
        let k = k as usize;
        if self.coeffs.len() <= k {
            self.coeffs.resize(k + 1, 0);
        }
        self.coeffs[k] += count;
    }

    pub fn coeffs(&self) -> &[u64] {
        let end = self
            .coeffs
            .iter()
            .rposition(|&c| c != 0)
            .map_or(0, |i| i + 1);
        &self.coeffs[..end]
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * theta.powi(k as i32))
            .sum()
    }
}

impl PartialEq<[u64]> for PowerSum {
    fn eq(&self, other: &[u64]) -> bool {
        self.coeffs() == other
    }
}
