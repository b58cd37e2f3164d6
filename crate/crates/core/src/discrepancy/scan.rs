use std::fmt::Write;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{asymptotic_density, position_slack, DensityValue, PrefixCounter};
use crate::engine::{FlowTime, Horizon, KakutaniRule, LeafTable};
use crate::error::{param, Result};
use crate::params::{LengthExponent, RatioClass};

/// Above this many expected points the scan switches to sampled prefix queries.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    /// Windows 2^min_exp, …, 2^max_exp.
    Dyadic {
        min_exp: u32,
        max_exp: u32,
    },
    Explicit {
        windows: Vec<f64>,
    },
}

impl Grid {
    pub fn windows(&self) -> Result<Vec<f64>> {
        let w = match self {
            Grid::Dyadic { min_exp, max_exp } => {
                if min_exp > max_exp || *max_exp > 1000 {
                    return param(format!("bad dyadic range {min_exp}..={max_exp}"));
                }
                (*min_exp..=*max_exp).map(|e| 2f64.powi(e as i32)).collect()
            }
            Grid::Explicit { windows } => windows.clone(),
        };
        if w.is_empty() {
            return param("the window grid is empty");
        }
        if w.iter().any(|&x| !(x > 0.0 && x.is_finite())) || w.windows(2).any(|p| p[0] >= p[1]) {
            return param("windows must be positive and strictly increasing");
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOptions {
    pub grid: Grid,
    pub exhaustive_limit: u64,
    /// Prefix queries per window once past the exhaustive range.
    pub samples_per_window: u32,
    /// Also report the largest discrepancy over all subintervals of [0, W].
    pub two_sided: bool,
}

impl ScanOptions {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            samples_per_window: 4096,
            two_sided: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    /// Every boundary and left limit in [0, exhaustive_upto] was scanned.
    pub exhaustive_upto: f64,
    pub points_scanned: u64,
    /// Windows beyond the exhaustive range, scanned by sampled prefix queries.
    pub sampled_windows: usize,
    pub samples_per_window: u32,
    /// Only intervals [0, x] enter max_disc.
    pub anchored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancySeries {
    pub alpha: f64,
    pub class: RatioClass,
    pub density: DensityValue,
    /// Flow time of the scanned patch.
    pub horizon_time: f64,
    /// Step count when the horizon was snapped to ℓ·g_α.
    pub horizon_steps: Option<u32>,
    pub window_sizes: Vec<f64>,
    /// sup over x ≤ W of |#(Λ ∩ [0, x]) − d·x|.
    pub max_disc: Vec<f64>,
    /// sup over intervals inside [0, W], when requested.
    pub two_sided: Option<Vec<f64>>,
    pub coverage: Coverage,
}

impl DiscrepancySeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("window,max_disc");
        if self.two_sided.is_some() {
            out.push_str(",two_sided");
        }
        out.push('\n');
        for (i, (w, d)) in self.window_sizes.iter().zip(&self.max_disc).enumerate() {
            write!(out, "{w},{d}").unwrap();
            if let Some(t) = &self.two_sided {
                write!(out, ",{}", t[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Smallest horizon covering `t`: exact steps ℓ·g_α for commensurable rules,
/// so that tile lengths are prototile lengths and the Perron density applies.
pub fn scan_horizon(rule: &KakutaniRule, t: f64) -> Result<Horizon> {
    match rule.step_length() {
        Some(g) => {
            let steps = (t / g - 1e-9).ceil().max(0.0);
            if steps > u32::MAX as f64 {
                return param(format!("t = {t} is too large"));
            }
            rule.horizon(FlowTime::Steps(steps as u32))
        }
        None => rule.horizon(FlowTime::Real(t)),
    }
}

struct Extremes {
    abs: f64,
    hi: f64,
    lo: f64,
}

impl Extremes {
    fn new() -> Self {
        Self {
            abs: 0.0,
            hi: f64::NEG_INFINITY,
            lo: f64::INFINITY,
        }
    }

    fn push(&mut self, signed: f64) {
        self.abs = self.abs.max(signed.abs());
        self.hi = self.hi.max(signed);
        self.lo = self.lo.min(signed);
    }

    fn spread(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

/// Anchored discrepancy series of the left-endpoint set of F_t(I).
///
/// The count N(x) is a step function, so |N(x) − d·x| peaks at a point or
/// just before it, or at the window end; all three are visited exactly while
/// streaming the tiles in order.
pub fn discrepancy_scan(
    alpha: f64,
    class: &RatioClass,
    t: f64,
    opts: &ScanOptions,
) -> Result<DiscrepancySeries> {
    let windows = opts.grid.windows()?;
    let rule = KakutaniRule::from_class(alpha, class)?;
    let alpha = rule.alpha().min(1.0 - rule.alpha());
    let density = asymptotic_density(alpha, class)?;
    let d = density.value;
    let horizon = scan_horizon(&rule, t)?;
    let w_max = *windows.last().unwrap();
    if w_max > horizon.scale() + position_slack(w_max) {
        return param(format!(
            "largest window {w_max} exceeds the patch length e^t = {}",
            horizon.scale()
        ));
    }

    let exhaustive_upto = w_max.min(opts.exhaustive_limit as f64 / d);
    let table = LeafTable::new(&horizon);
    let (rows, cols) = table.depth_bound();
    let lengths: Vec<Vec<f64>> = (0..=rows + 1)
        .map(|a| {
            (0..=cols + 1)
                .map(|b| horizon.length(LengthExponent::new(a as u32, b as u32)))
                .collect()
        })
        .collect();

    let mut max_disc = Vec::with_capacity(windows.len());
    let mut two_sided = Vec::with_capacity(windows.len());
    let mut ext = Extremes::new();
    let mut k: u64 = 0;
    let mut wi = 0;
    let mut stack: Vec<(u32, u32, f64)> = vec![(0, 0, 0.0)];
    let stop = exhaustive_upto + position_slack(exhaustive_upto);
    while let Some((a, b, pos)) = stack.pop() {
        if pos > stop {
            break;
        }
        let e = LengthExponent::new(a, b);
        if table.is_internal(e) {
            stack.push((a, b + 1, pos + lengths[a as usize + 1][b as usize]));
            stack.push((a + 1, b, pos));
            continue;
        }
        while wi < windows.len() && windows[wi] < pos - position_slack(pos) {
            ext.push(k as f64 - d * windows[wi]);
            max_disc.push(ext.abs);
            two_sided.push(ext.spread());
            wi += 1;
        }
        if k > 0 {
            ext.push(k as f64 - d * pos);
        }
        k += 1;
        ext.push(k as f64 - d * pos);
    }
    while wi < windows.len() && windows[wi] <= exhaustive_upto {
        ext.push(k as f64 - d * windows[wi]);
        max_disc.push(ext.abs);
        two_sided.push(ext.spread());
        wi += 1;
    }

    let sampled_windows = windows.len() - wi;
    if sampled_windows > 0 {
        let counter = PrefixCounter::new(&horizon);
        let mut prev = exhaustive_upto;
        for &w in &windows[wi..] {
            let s = opts.samples_per_window.max(1);
            for j in 1..=s {
                let x = prev + (w - prev) * j as f64 / s as f64;
                let c = counter.count_upto(x)?.to_f64().unwrap_or(f64::INFINITY);
                ext.push(c - d * x);
            }
            max_disc.push(ext.abs);
            two_sided.push(ext.spread());
            prev = w;
        }
    }

    Ok(DiscrepancySeries {
        alpha,
        class: *class,
        density,
        horizon_time: horizon.log_scale(),
        horizon_steps: rule
            .step_length()
            .map(|g| (horizon.log_scale() / g).round() as u32),
        window_sizes: windows,
        max_disc,
        two_sided: opts.two_sided.then_some(two_sided),
        coverage: Coverage {
            exhaustive_upto,
            points_scanned: k,
            sampled_windows,
            samples_per_window: opts.samples_per_window,
            anchored: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_bounded_by_one() {
        let cls = RatioClass::Commensurable { n: 1, m: 1 };
        let opts = ScanOptions::new(Grid::Dyadic {
            min_exp: 0,
            max_exp: 12,
        });
        let s = discrepancy_scan(0.5, &cls, 12.0 * 2f64.ln(), &opts).unwrap();
        assert!(s.max_disc.iter().all(|&v| v <= 1.0 + 1e-9));
        assert_eq!(s.coverage.points_scanned, 4096);
    }

    #[test]
    fn brute_force_agrees() {
        // Direct evaluation at all points and left limits of a materialized patch.
        let alpha = 0.3;
        let cls = RatioClass::Incommensurable {
            r: 0.3f64.ln() / 0.7f64.ln(),
        };
        let t = 9.0;
        let p = KakutaniRule::new(alpha)
            .unwrap()
            .patch(FlowTime::Real(t), 1 << 20)
            .unwrap();
        let d = asymptotic_density(alpha, &cls).unwrap().value;
        let windows = vec![10.0, 100.0, 1000.0, 8000.0];
        let s = discrepancy_scan(
            alpha,
            &cls,
            t,
            &ScanOptions {
                two_sided: true,
                ..ScanOptions::new(Grid::Explicit {
                    windows: windows.clone(),
                })
            },
        )
        .unwrap();
        for (i, &w) in windows.iter().enumerate() {
            let mut best = 0.0f64;
            let mut vals = Vec::new();
            let mut count = 0;
            for j in 0..p.len() {
                let x = p.real_position(j);
                if x > w {
                    break;
                }
                vals.push(count as f64 - d * x);
                count += 1;
                vals.push(count as f64 - d * x);
            }
            vals.push(count as f64 - d * w);
            for v in &vals[1..] {
                best = best.max(v.abs());
            }
            assert!(
                (s.max_disc[i] - best).abs() < 1e-6,
                "{} vs {best}",
                s.max_disc[i]
            );
            let spread = vals[1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - vals[1..].iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((s.two_sided.as_ref().unwrap()[i] - spread).abs() < 1e-6);
        }
    }

    #[test]
    fn sampled_tail_is_monotone() {
        let cls = RatioClass::Commensurable { n: 2, m: 1 };
        let a = crate::params::solve_alpha(2, 1).unwrap();
        let opts = ScanOptions {
            exhaustive_limit: 1000,
            samples_per_window: 64,
            ..ScanOptions::new(Grid::Dyadic {
                min_exp: 4,
                max_exp: 14,
            })
        };
        let s = discrepancy_scan(a, &cls, 14.0 * 2f64.ln(), &opts).unwrap();
        assert!(s.coverage.sampled_windows > 0);
        assert!(s.max_disc.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn window_beyond_patch() {
        let cls = RatioClass::Commensurable { n: 1, m: 1 };
        let opts = ScanOptions::new(Grid::Explicit {
            windows: vec![100.0],
        });
        assert!(discrepancy_scan(0.5, &cls, 2.0, &opts).is_err());
    }
}
