//! The α-Kakutani substitution semi-flow.
//!
//! `F_t(I)` is produced by inflating the unit tile by e^t and splitting every
//! tile longer than 1 into an α-piece (left) and a (1−α)-piece (right). A tile
//! is identified by the exponent pair (a, b) of its length e^t·α^a(1−α)^b, so
//! the whole patch is a binary tree whose leaves are the tiles and whose
//! root-to-leaf paths are the walks on the one-vertex graph G_α.

pub(crate) mod export;
mod metric;
mod patch;
mod position;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::params::{self, LengthExponent, RatioClass};

pub use export::{patch_csv, patch_svg, point_set_csv, TileRecord};
pub use metric::{chabauty_fell_distance, CfDistance};
pub use patch::{delone_points, substitute_once, Patch, PointSet, Tile};
pub use position::{ExactPosition, PowerSum};

/// Default cap on materialized tile counts.
pub const DEFAULT_MAX_TILES: u64 = 100_000_000;

/// Log-domain tolerance for "length exactly 1" when t is a generic real.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// How far the semi-flow runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowTime {
    /// A real time t ≥ 0; unit-length detection uses [`UNIT_TOLERANCE`].
    Real(f64),
    /// t = ℓ·g_α for a commensurable rule; unit-length detection is exact.
    Steps(u32),
}

/// The one-vertex graph with loops of lengths log(1/α) and log(1/(1−α)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphAlpha {
    pub loop_lengths: (f64, f64),
}

impl GraphAlpha {
    /// Number of directed walks of length t from the vertex, counted by
    /// composition: a walk is a word over the two loops whose proper prefix
    /// ends before t and which itself reaches t. There are C(a+b, a) prefixes
    /// with a α-loops and b (1−α)-loops.
    pub fn count_walks(&self, horizon: &Horizon) -> BigUint {
        if !horizon.exceeds_unit(LengthExponent::UNIT) {
            return BigUint::one();
        }
        let mut total = BigUint::default();
        // Pascal rows, row s holds C(s, a) for a = 0..=s.
        let mut row: Vec<BigUint> = vec![BigUint::one()];
        let mut s = 0u32;
        loop {
            let mut any = false;
            for a in 0..=s {
                let e = LengthExponent::new(a, s - a);
                if !horizon.exceeds_unit(e) {
                    continue;
                }
                any = true;
                let ends = [e.alpha_child(), e.complement_child()]
                    .iter()
                    .filter(|c| !horizon.exceeds_unit(**c))
                    .count();
                total += &row[a as usize] * BigUint::from(ends);
            }
            if !any {
                break;
            }
            let mut next = vec![BigUint::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
            s += 1;
        }
        total
    }
}

/// An α-Kakutani rule, optionally carrying the exact ratio r_α = n/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KakutaniRule {
    alpha: f64,
    log_inv_alpha: f64,
    log_inv_beta: f64,
    ratio: Option<(u32, u32)>,
}

impl KakutaniRule {
    /// A rule for any α ∈ (0,1). Only real flow times are available.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return param(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        Ok(Self {
            alpha,
            log_inv_alpha: -alpha.ln(),
            log_inv_beta: -(1.0 - alpha).ln(),
            ratio: None,
        })
    }

    /// The commensurable rule with α^m = (1−α)^n.
    pub fn commensurable(n: u32, m: u32) -> Result<Self> {
        let alpha = params::solve_alpha(n, m)?;
        Ok(Self {
            ratio: Some((n, m)),
            ..Self::new(alpha)?
        })
    }

    /// Commensurable classes use the exact rule; incommensurable ones use α as given.
    pub fn from_class(alpha: f64, class: &RatioClass) -> Result<Self> {
        match *class {
            RatioClass::Commensurable { n, m } => Self::commensurable(n, m),
            RatioClass::Incommensurable { .. } => Self::new(alpha),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ratio(&self) -> Option<(u32, u32)> {
        self.ratio
    }

    pub fn graph(&self) -> GraphAlpha {
        GraphAlpha {
            loop_lengths: (self.log_inv_alpha, self.log_inv_beta),
        }
    }

    /// g_α = log(1/α)/n, the common edge length of the refined graph.
    pub fn step_length(&self) -> Option<f64> {
        self.ratio.map(|(n, _)| self.log_inv_alpha / n as f64)
    }

    pub fn horizon(&self, time: FlowTime) -> Result<Horizon> {
        match time {
            FlowTime::Real(t) => {
                if !(t >= 0.0 && t.is_finite()) {
                    return param(format!(
                        "flow time must be finite and non-negative, got {t}"
                    ));
                }
                Ok(Horizon {
                    alpha: self.alpha,
                    l1: self.log_inv_alpha,
                    l2: self.log_inv_beta,
                    log_scale: t,
                    steps: None,
                })
            }
            FlowTime::Steps(ell) => {
                let Some((n, m)) = self.ratio else {
                    return param("step horizons need a commensurable rule");
                };
                let g = self.log_inv_alpha / n as f64;
                Ok(Horizon {
                    alpha: self.alpha,
                    l1: self.log_inv_alpha,
                    l2: self.log_inv_beta,
                    log_scale: ell as f64 * g,
                    steps: Some((ell, n, m)),
                })
            }
        }
    }

    /// Number of tiles of F_t(I), without materializing the patch.
    pub fn count_tiles(&self, time: FlowTime) -> Result<BigUint> {
        Ok(LeafTable::new(&self.horizon(time)?).total())
    }

    /// F_t(I) with I's left endpoint at 0.
    pub fn patch(&self, time: FlowTime, max_tiles: u64) -> Result<Patch> {
        let horizon = self.horizon(time)?;
        let count = LeafTable::new(&horizon).total();
        if count > BigUint::from(max_tiles) {
            return Err(Error::Resource {
                needed: count.to_string(),
                cap: max_tiles,
            });
        }
        let mut tiles = Vec::with_capacity(usize::try_from(&count).unwrap_or(0));
        let mut stack = vec![Tile::new(ExactPosition::zero(), LengthExponent::UNIT)];
        while let Some(tile) = stack.pop() {
            if horizon.exceeds_unit(tile.length) {
                let [left, right] = tile.split();
                stack.push(right);
                stack.push(left);
            } else {
                tiles.push(tile);
            }
        }
        Ok(Patch::from_parts(self.alpha, horizon.scale(), 0.0, tiles))
    }
}

/// A resolved flow time: the inflation e^t and the exact split predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    alpha: f64,
    l1: f64,
    l2: f64,
    log_scale: f64,
    steps: Option<(u32, u32, u32)>,
}

impl Horizon {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn scale(&self) -> f64 {
        match self.steps {
            Some((ell, n, _)) if ell <= i32::MAX as u32 => self.xi(n).powi(ell as i32),
            _ => self.log_scale.exp(),
        }
    }

    /// ξ = α^{-1/n}; integer powers of it stay exact where the exp of a
    /// rounded logarithm would not (ξ = 2 in the lattice case).
    fn xi(&self, n: u32) -> f64 {
        self.alpha.powf(-1.0 / n as f64)
    }

    pub fn is_exact(&self) -> bool {
        self.steps.is_some()
    }

    /// Whether a node of relative length α^a(1−α)^b is longer than 1 after
    /// inflation, i.e. must be split.
    pub fn exceeds_unit(&self, e: LengthExponent) -> bool {
        match self.steps {
            Some((ell, n, m)) => (ell as u64) > n as u64 * e.a as u64 + m as u64 * e.b as u64,
            None => self.log_length(e) > UNIT_TOLERANCE,
        }
    }

    pub fn log_length(&self, e: LengthExponent) -> f64 {
        match self.steps {
            Some((ell, n, m)) => {
                let g = self.l1 / n as f64;
                (ell as f64 - (n as f64 * e.a as f64 + m as f64 * e.b as f64)) * g
            }
            None => self.log_scale - e.a as f64 * self.l1 - e.b as f64 * self.l2,
        }
    }

    /// Real length of a node after inflation.
    pub fn length(&self, e: LengthExponent) -> f64 {
        match (self.steps, self.theta_exponent(e)) {
            (Some((_, n, _)), Some(k)) if k.abs() <= i32::MAX as i64 => {
                self.xi(n).powi(-(k as i32))
            }
            _ => self.log_length(e).exp(),
        }
    }

    /// For step horizons, the exponent k with real length ξ^{-k}.
    pub fn theta_exponent(&self, e: LengthExponent) -> Option<i64> {
        self.steps
            .map(|(ell, n, m)| n as i64 * e.a as i64 + m as i64 * e.b as i64 - ell as i64)
    }
}

/// Leaf counts of every internal node of the substitution tree, keyed by
/// exponent. Row `a` lists the nodes (a, 0), (a, 1), … that are split; every
/// other node is a single tile.
#[derive(Debug, Clone)]
pub struct LeafTable {
    horizon: Horizon,
    rows: Vec<Vec<BigUint>>,
}

impl LeafTable {
    pub fn new(horizon: &Horizon) -> Self {
        let mut widths = Vec::new();
        while horizon.exceeds_unit(LengthExponent::new(widths.len() as u32, 0)) {
            let a = widths.len() as u32;
            let w = (0u32..)
                .take_while(|&b| horizon.exceeds_unit(LengthExponent::new(a, b)))
                .count();
            widths.push(w);
        }
        let mut rows: Vec<Vec<BigUint>> = vec![Vec::new(); widths.len()];
        for a in (0..widths.len()).rev() {
            let w = widths[a];
            let mut row = vec![BigUint::default(); w];
            let mut right = BigUint::one();
            for b in (0..w).rev() {
                let below = rows.get(a + 1).and_then(|r| r.get(b));
                let v = match below {
                    Some(l) => l + &right,
                    None => &right + 1u32,
                };
                row[b] = v.clone();
                right = v;
            }
            rows[a] = row;
        }
        Self {
            horizon: *horizon,
            rows,
        }
    }

    pub fn horizon(&self) -> &Horizon {
        &self.horizon
    }

    /// Whether the node `e` is split at this horizon.
    pub fn is_internal(&self, e: LengthExponent) -> bool {
        self.rows
            .get(e.a as usize)
            .is_some_and(|r| (e.b as usize) < r.len())
    }

    /// Largest a with a split node, plus one; rows beyond are all leaves.
    pub fn depth_bound(&self) -> (usize, usize) {
        (self.rows.len(), self.rows.first().map_or(0, Vec::len))
    }

    /// Number of tiles below the node `e`.
    pub fn leaves(&self, e: LengthExponent) -> BigUint {
        self.rows
            .get(e.a as usize)
            .and_then(|r| r.get(e.b as usize))
            .cloned()
            .unwrap_or_else(BigUint::one)
    }

    pub fn total(&self) -> BigUint {
        self.leaves(LengthExponent::UNIT)
    }

    /// Number of distinct split nodes.
    pub fn internal_nodes(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// F_t(I) with I placed so that its left endpoint sits at −origin_offset·e^t.
pub fn generate_patch(alpha: f64, t: f64, origin_offset: f64) -> Result<Patch> {
    generate_patch_capped(alpha, t, origin_offset, DEFAULT_MAX_TILES)
}

pub fn generate_patch_capped(
    alpha: f64,
    t: f64,
    origin_offset: f64,
    max_tiles: u64,
) -> Result<Patch> {
    if !(origin_offset > 0.0 && origin_offset < 1.0) {
        return param(format!(
            "origin offset must lie in (0, 1), got {origin_offset}"
        ));
    }
    let patch = KakutaniRule::new(alpha)?.patch(FlowTime::Real(t), max_tiles)?;
    let shift = -origin_offset * patch.scale();
    Ok(patch.with_origin(shift))
}

/// Tile count of F_t(I) via the memoized leaf table.
pub fn count_tiles(alpha: f64, t: f64) -> Result<BigUint> {
    KakutaniRule::new(alpha)?.count_tiles(FlowTime::Real(t))
}
