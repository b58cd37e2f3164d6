//! Fixed-scale primitive substitutions covering commensurable rules.
//!
//! When α^m = (1−α)^n, subdividing the two loops of G_α into n and m edges of
//! common length g_α = log(1/α)/n gives a graph G'_α whose vertices are the
//! prototiles of a primitive substitution ρ_α with inflation ξ = e^{g_α}.
//! Vertex 1 is the original vertex, 2..n run along the α-loop and
//! n+1..n+m−1 along the (1−α)-loop. The same construction with three loops
//! gives the (α, β) rules.

mod export;
mod iterate;
mod matrix;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::params::validate_ratio;
use crate::poly::IntPolynomial;

pub use export::{matrix_json, rule_dot, rule_json};
pub use iterate::{iterate_primitive, verify_cover, CoverReport, LabelledPatch, LabelledTile};
pub use matrix::{char_poly, substitution_matrix, tile_counts, SubstitutionMatrix};

/// One tile of ρ(T_j): prototile label (1-based) and its left offset inside
/// ξ·T_j, as a sum of powers of θ = ξ^{-1} in prototile units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Child {
    pub label: u32,
    pub offset: Vec<u32>,
}

/// A one-vertex graph with loops of the given edge counts, read as a
/// fixed-scale substitution. Prototile j has length θ^{depth(j)}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveRule {
    loops: Vec<u32>,
    xi: f64,
    depths: Vec<u32>,
    images: Vec<Vec<Child>>,
}

impl PrimitiveRule {
    /// Loops are listed left to right as they appear in ρ(I).
    pub fn from_loops(loops: &[u32]) -> Result<Self> {
        if loops.is_empty() || loops.contains(&0) {
            return param("loops need at least one edge each");
        }
        let xi = perron_of_loops(loops);
        let mut depths = vec![0u32];
        let mut images: Vec<Vec<Child>> = vec![Vec::new()];
        let mut root_children = Vec::new();
        let mut offset: Vec<u32> = Vec::new();
        for &len in loops {
            let first = depths.len() as u32 + 1;
            // Vertex p steps along the loop has len − p edges left to go home.
            for p in 1..len {
                depths.push(len - p);
                let next = if p + 1 < len { first + p } else { 1 };
                images.push(vec![Child {
                    label: next,
                    offset: Vec::new(),
                }]);
            }
            let label = if len > 1 { first } else { 1 };
            root_children.push(Child {
                label,
                offset: offset.clone(),
            });
            offset.push(depths[label as usize - 1]);
        }
        images[0] = root_children;
        Ok(Self {
            loops: loops.to_vec(),
            xi,
            depths,
            images,
        })
    }

    pub fn loops(&self) -> &[u32] {
        &self.loops
    }

    /// Number of prototiles.
    pub fn size(&self) -> usize {
        self.depths.len()
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn theta(&self) -> f64 {
        self.xi.recip()
    }

    /// θ-exponent of |T_label|.
    pub fn depth(&self, label: u32) -> u32 {
        self.depths[label as usize - 1]
    }

    pub fn depths(&self) -> &[u32] {
        &self.depths
    }

    pub fn prototile_lengths(&self) -> Vec<f64> {
        self.depths
            .iter()
            .map(|&d| self.theta().powi(d as i32))
            .collect()
    }

    /// ρ(T_label), left to right.
    pub fn image(&self, label: u32) -> &[Child] {
        &self.images[label as usize - 1]
    }

    /// Polynomial whose roots are the nonzero eigenvalues of the matrix:
    /// x^L − Σ x^{L−ℓ_i} for the longest loop L.
    pub fn loop_polynomial(&self) -> IntPolynomial {
        let top = *self.loops.iter().max().unwrap() as usize;
        let mut terms = vec![(1i64, top)];
        terms.extend(self.loops.iter().map(|&l| (-1i64, top - l as usize)));
        IntPolynomial::from_terms(&terms)
    }
}

/// Unique x > 1 with Σ x^{−ℓ_i} = 1.
fn perron_of_loops(loops: &[u32]) -> f64 {
    let g = |x: f64| loops.iter().map(|&l| x.powi(-(l as i32))).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (1.0_f64, loops.len().max(2) as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// ρ_α for α^m = (1−α)^n.
pub fn build_rho(n: u32, m: u32) -> Result<PrimitiveRule> {
    validate_ratio(n, m)?;
    if n == m {
        return param("the lattice case n = m = 1 has no covering rule");
    }
    PrimitiveRule::from_loops(&[n, m])
}

/// The (α, β) rule for α^k = β^m = (1−α−β)^n read through its polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeIntervalRule {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub rule: PrimitiveRule,
    /// x^n − x^{n−m} − x^{n−k} − 1.
    pub f: IntPolynomial,
    /// Interval lengths left to right: ξ^{-n}, ξ^{-m}, ξ^{-k}.
    pub lengths: [f64; 3],
    /// max |log a/n − log b/m|, |log b/m − log c/k| over the lengths (a, b, c).
    pub proportional_residual: f64,
    /// Largest pairwise gap in log(a^k), log(b^m), log(c^n).
    pub power_relation_residual: f64,
}

pub fn build_three_interval_rule(n: u32, m: u32, k: u32) -> Result<ThreeIntervalRule> {
    if k == 0 || !(n >= m && m >= k) {
        return param(format!("expected n >= m >= k >= 1, got ({n}, {m}, {k})"));
    }
    if num_integer::gcd(num_integer::gcd(n, m), k) != 1 {
        return Err(Error::Parameter(format!(
            "gcd({n}, {m}, {k}) != 1: the rule is not primitive"
        )));
    }
    let rule = PrimitiveRule::from_loops(&[n, m, k])?;
    let f = IntPolynomial::from_terms(&[
        (1, n as usize),
        (-1, (n - m) as usize),
        (-1, (n - k) as usize),
        (-1, 0),
    ]);
    let xi = rule.xi();
    let lengths = [
        xi.powi(-(n as i32)),
        xi.powi(-(m as i32)),
        xi.powi(-(k as i32)),
    ];
    let logs = lengths.map(f64::ln);
    let proportional_residual = (logs[0] / n as f64 - logs[1] / m as f64)
        .abs()
        .max((logs[1] / m as f64 - logs[2] / k as f64).abs());
    let powers = [k as f64 * logs[0], m as f64 * logs[1], n as f64 * logs[2]];
    let power_relation_residual = (powers[0] - powers[1])
        .abs()
        .max((powers[1] - powers[2]).abs())
        .max((powers[0] - powers[2]).abs());
    Ok(ThreeIntervalRule {
        n,
        m,
        k,
        rule,
        f,
        lengths,
        proportional_residual,
        power_relation_residual,
    })
}
