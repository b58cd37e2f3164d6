use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use super::matrix::{substitution_matrix, tile_counts};
use super::{build_rho, PrimitiveRule};
use crate::engine::{FlowTime, KakutaniRule, PowerSum, TileRecord};
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// A prototile copy inside (ξρ)^ℓ(I). The position is a sum of powers of θ in
/// units of the whole patch, so the patch itself is [0, 1] in these units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelledTile {
    pub label: u32,
    pub position: PowerSum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledPatch {
    rule: PrimitiveRule,
    ell: u32,
    tiles: Vec<LabelledTile>,
}

impl LabelledPatch {
    pub fn rule(&self) -> &PrimitiveRule {
        &self.rule
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn tiles(&self) -> &[LabelledTile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// θ-exponent of tile i relative to the patch.
    pub fn relative_exponent(&self, i: usize) -> u32 {
        self.ell + self.rule.depth(self.tiles[i].label)
    }

    pub fn real_position(&self, i: usize) -> f64 {
        let th = self.rule.theta();
        self.tiles[i]
            .position
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * th.powi(k as i32 - self.ell as i32))
            .sum()
    }

    pub fn real_length(&self, i: usize) -> f64 {
        self.rule
            .theta()
            .powi(self.rule.depth(self.tiles[i].label) as i32)
    }

    /// [0, ξ^ℓ].
    pub fn support(&self) -> (f64, f64) {
        (0.0, self.rule.xi().powi(self.ell as i32))
    }

    fn right_end(&self, i: usize) -> PowerSum {
        let mut p = self.tiles[i].position.clone();
        p.add_power(self.relative_exponent(i), 1);
        p
    }

    /// Each tile ends where the next starts, exactly in ℤ[ξ]/(f).
    pub fn is_contiguous(&self) -> bool {
        let f = self.rule.loop_polynomial();
        (1..self.len()).all(|i| same_point(&self.right_end(i - 1), &self.tiles[i].position, &f))
    }

    pub fn records(&self) -> Vec<TileRecord> {
        (0..self.len())
            .map(|i| TileRecord {
                position: self.real_position(i),
                length: self.real_length(i),
                label: Some(self.tiles[i].label),
            })
            .collect()
    }
}

/// Exact equality of Σ c_k ξ^{-k} and Σ c'_k ξ^{-k}: identical coefficients,
/// or ξ^K times the difference is divisible by f.
pub(crate) fn same_point(a: &PowerSum, b: &PowerSum, f: &IntPolynomial) -> bool {
    if a.coeffs() == b.coeffs() {
        return true;
    }
    let top = a.coeffs().len().max(b.coeffs().len());
    let get = |p: &PowerSum, k: usize| BigInt::from(p.coeffs().get(k).copied().unwrap_or(0));
    // Coefficient of x^{top−1−k} is c_k − c'_k.
    let diff: Vec<BigInt> = (0..top).rev().map(|k| get(a, k) - get(b, k)).collect();
    IntPolynomial::new(diff).is_divisible_by(f)
}

/// (ξρ)^ℓ(I) as a labelled patch.
pub fn iterate_primitive(rule: &PrimitiveRule, ell: u32, max_tiles: u64) -> Result<LabelledPatch> {
    let count: BigUint = tile_counts(&substitution_matrix(rule), ell).iter().sum();
    if count > BigUint::from(max_tiles) {
        return Err(Error::Resource {
            needed: count.to_string(),
            cap: max_tiles,
        });
    }
    let mut tiles = Vec::new();
    let mut stack = vec![(
        0u32,
        LabelledTile {
            label: 1,
            position: PowerSum::zero(),
        },
    )];
    while let Some((level, node)) = stack.pop() {
        if level == ell {
            tiles.push(node);
            continue;
        }
        for child in rule.image(node.label).iter().rev() {
            let mut position = node.position.clone();
            for &d in &child.offset {
                position.add_power(level + 1 + d, 1);
            }
            stack.push((
                level + 1,
                LabelledTile {
                    label: child.label,
                    position,
                },
            ));
        }
    }
    Ok(LabelledPatch {
        rule: rule.clone(),
        ell,
        tiles,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub n: u32,
    pub m: u32,
    pub ell: u32,
    pub flow_tiles: usize,
    pub primitive_tiles: usize,
    /// Index of the first tile whose left end or length differs.
    pub first_mismatch: Option<usize>,
    /// Both patches end exactly at the inflated unit.
    pub right_ends_agree: bool,
    pub agree: bool,
}

/// Compares F_{ℓ·g}(I) from the semi-flow with (ξρ_α)^ℓ(I), tile by tile, exactly.
pub fn verify_cover(n: u32, m: u32, ell: u32, max_tiles: u64) -> Result<CoverReport> {
    let rule = build_rho(n, m)?;
    let f = rule.loop_polynomial();
    let flow = KakutaniRule::commensurable(n, m)?.patch(FlowTime::Steps(ell), max_tiles)?;
    let prim = iterate_primitive(&rule, ell, max_tiles)?;

    let as_power = |e: crate::LengthExponent| n * e.a + m * e.b;
    let flow_pos = |i: usize| {
        let mut p = PowerSum::zero();
        for (e, c) in flow.tiles()[i].position.terms() {
            p.add_power(as_power(e), c);
        }
        p
    };

    let mut first_mismatch = None;
    if flow.len() == prim.len() {
        for i in 0..flow.len() {
            let same_len = as_power(flow.tiles()[i].length) == prim.relative_exponent(i);
            if !same_len || !same_point(&flow_pos(i), &prim.tiles()[i].position, &f) {
                first_mismatch = Some(i);
                break;
            }
        }
    } else {
        first_mismatch = Some(flow.len().min(prim.len()));
    }

    let mut unit = PowerSum::zero();
    unit.add_power(0, 1);
    let right_ends_agree = match (flow.len().checked_sub(1), prim.len().checked_sub(1)) {
        (Some(i), Some(j)) => {
            let mut fe = flow_pos(i);
            fe.add_power(as_power(flow.tiles()[i].length), 1);
            same_point(&fe, &unit, &f) && same_point(&prim.right_end(j), &unit, &f)
        }
        _ => false,
    };

    Ok(CoverReport {
        n,
        m,
        ell,
        flow_tiles: flow.len(),
        primitive_tiles: prim.len(),
        first_mismatch,
        right_ends_agree,
        agree: first_mismatch.is_none() && right_ends_agree,
    })
}
