use serde::Serialize;

use super::patch::PointSet;

/// Chabauty–Fell distance between two windowed point sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CfDistance {
    pub value: f64,
    /// False when some window fails to cover (−1/ε, 1/ε); the value is then
    /// only a lower bound for the distance between the full sets.
    pub certified: bool,
}

/// Smallest ε ∈ [0,1] such that each set, restricted to (−1/ε, 1/ε), lies in
/// the closed ε-neighbourhood of the other; 1 if no ε < 1 works.
///
/// A point p of A constrains ε exactly when ε < 1/|p| and ε < dist(p, B), so
/// the answer is the largest of min(dist(p, B), 1/|p|) over both sets.
pub fn chabauty_fell_distance(a: &PointSet, b: &PointSet) -> CfDistance {
    let value = one_sided(a.points(), b.points())
        .max(one_sided(b.points(), a.points()))
        .min(1.0);
    let reach = if value > 0.0 {
        1.0 / value
    } else {
        f64::INFINITY
    };
    let covers = |s: &PointSet| s.window().0 <= -reach && s.window().1 >= reach;
    CfDistance {
        value,
        certified: covers(a) && covers(b),
    }
}

fn one_sided(from: &[f64], to: &[f64]) -> f64 {
    from.iter()
        .map(|&p| {
            let horizon = if p == 0.0 {
                f64::INFINITY
            } else {
                1.0 / p.abs()
            };
            nearest_distance(to, p).min(horizon)
        })
        .fold(0.0, f64::max)
}

fn nearest_distance(sorted: &[f64], p: f64) -> f64 {
    let i = sorted.partition_point(|&q| q < p);
    let right = sorted.get(i).map_or(f64::INFINITY, |&q| q - p);
    let left = i.checked_sub(1).map_or(f64::INFINITY, |j| p - sorted[j]);
    left.min(right)
}
