use serde::Serialize;

use super::export::TileRecord;
use super::position::ExactPosition;
use crate::error::{param, Result};
use crate::params::LengthExponent;

/// An unlabelled tile: exact left endpoint and exact length, both in units
/// of the owning patch's scale.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Tile {
    pub position: ExactPosition,
    pub length: LengthExponent,
}

impl Tile {
    pub fn new(position: ExactPosition, length: LengthExponent) -> Self {
        Self { position, length }
    }

    /// The α-piece and the (1−α)-piece, left to right.
    pub fn split(&self) -> [Tile; 2] {
        let left = self.length.alpha_child();
        let right = self.length.complement_child();
        [
            Tile::new(self.position.clone(), left),
            Tile::new(self.position.plus(left), right),
        ]
    }

    pub fn right_end(&self) -> ExactPosition {
        self.position.plus(self.length)
    }
}

/// A finite run of contiguous tiles. Real coordinates are
/// `origin + scale · exact`, so positions stay exact until output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Patch {
    alpha: f64,
    scale: f64,
    origin: f64,
    tiles: Vec<Tile>,
}

impl Patch {
    pub(crate) fn from_parts(alpha: f64, scale: f64, origin: f64, tiles: Vec<Tile>) -> Self {
        Self {
            alpha,
            scale,
            origin,
            tiles,
        }
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn real_position(&self, i: usize) -> f64 {
        self.origin + self.scale * self.tiles[i].position.value(self.alpha)
    }

    pub fn real_length(&self, i: usize) -> f64 {
        self.scale * self.tiles[i].length.value(self.alpha)
    }

    /// `[left, right]` in real coordinates.
    pub fn support(&self) -> (f64, f64) {
        match self.tiles.len() {
            0 => (self.origin, self.origin),
            k => (
                self.real_position(0),
                self.origin + self.scale * self.tiles[k - 1].right_end().value(self.alpha),
            ),
        }
    }

    /// Each tile ends exactly where the next one starts.
    pub fn is_contiguous(&self) -> bool {
        self.tiles
            .windows(2)
            .all(|w| w[0].right_end().exactly_equals(&w[1].position))
    }

    /// Contiguous, and the union is exactly `root`.
    pub fn exactly_tiles(&self, root: &Tile) -> bool {
        let (Some(first), Some(last)) = (self.tiles.first(), self.tiles.last()) else {
            return false;
        };
        first.position.exactly_equals(&root.position)
            && last.right_end().exactly_equals(&root.right_end())
            && self.is_contiguous()
    }

    pub fn records(&self) -> Vec<TileRecord> {
        (0..self.len())
            .map(|i| TileRecord {
                position: self.real_position(i),
                length: self.real_length(i),
                label: None,
            })
            .collect()
    }
}

/// One application of the rule to an unlabelled tile, in the tile's own units.
pub fn substitute_once(tile: &Tile, alpha: f64) -> Patch {
    Patch::from_parts(alpha, 1.0, 0.0, tile.split().to_vec())
}

/// Finite window of a Delone set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    points: Vec<f64>,
    window: (f64, f64),
}

impl PointSet {
    /// Points must be strictly increasing and inside the window. Infinite
    /// window ends mean the set is known to be complete on that side.
    pub fn new(points: Vec<f64>, window: (f64, f64)) -> Result<Self> {
        if window.0.is_nan() || window.1.is_nan() || window.0 > window.1 {
            return param(format!("bad window [{}, {}]", window.0, window.1));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return param("points must be finite");
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return param("points must be strictly increasing");
        }
        if points.iter().any(|&p| p < window.0 || p > window.1) {
            return param("points must lie inside the window");
        }
        Ok(Self { points, window })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut points: Vec<f64>, window: (f64, f64)) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        points.dedup();
        Self::new(points, window)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Left endpoints of the tiles, windowed to the patch support.
pub fn delone_points(patch: &Patch) -> PointSet {
    PointSet {
        points: (0..patch.len()).map(|i| patch.real_position(i)).collect(),
        window: patch.support(),
    }
}
