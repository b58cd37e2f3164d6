//! Densities, prefix counts and interval discrepancies of the left-endpoint
//! Delone sets, at scales far beyond what can be materialized.

mod fit;
mod scan;

use num_bigint::BigUint;
use serde::Serialize;

use crate::cover::{build_rho, substitution_matrix};
use crate::engine::{FlowTime, Horizon, KakutaniRule, LeafTable};
use crate::error::{param, Result};
use crate::params::{LengthExponent, RatioClass};
use crate::spectral::{find_roots, perron_vectors};

pub use fit::{growth_fit, loglog_svg, GrowthFit, GrowthModel, ModelFit};
pub use scan::{
    discrepancy_scan, scan_horizon, Coverage, DiscrepancySeries, Grid, ScanOptions,
    DEFAULT_EXHAUSTIVE_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    ClosedForm,
    Perron,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityValue {
    pub value: f64,
    pub method: DensityMethod,
}

/// Points per unit length. Incommensurable α uses 1/H(α) with H the entropy
/// in nats; commensurable rules use tile frequencies from the Perron vector.
pub fn asymptotic_density(alpha: f64, class: &RatioClass) -> Result<DensityValue> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return param(format!("alpha must lie in (0, 1/2], got {alpha}"));
    }
    match *class {
        RatioClass::Incommensurable { .. } => Ok(DensityValue {
            value: closed_form_density(alpha),
            method: DensityMethod::ClosedForm,
        }),
        RatioClass::Commensurable { n: 1, m: 1 } => Ok(DensityValue {
            value: 1.0,
            method: DensityMethod::Perron,
        }),
        RatioClass::Commensurable { n, m } => {
            let rule = build_rho(n, m)?;
            let mat = substitution_matrix(&rule);
            let lambda1 = find_roots(&rule.loop_polynomial())?[0].re;
            let (freq, _) = perron_vectors(&mat, lambda1)?;
            let mean_length: f64 = freq
                .iter()
                .zip(rule.prototile_lengths())
                .map(|(u, l)| u * l)
                .sum();
            Ok(DensityValue {
                value: 1.0 / mean_length,
                method: DensityMethod::Perron,
            })
        }
    }
}

pub fn closed_form_density(alpha: f64) -> f64 {
    1.0 / (-alpha * alpha.ln() - (1.0 - alpha) * (1.0 - alpha).ln())
}

/// Tolerance for "point ≤ x" so that boundary-aligned queries count the
/// boundary point despite rounding in its evaluated position.
pub(crate) fn position_slack(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

/// Counts left endpoints of F_t(I), anchored at 0, in [0, x] by descending
/// the substitution tree: O(depth) per query.
#[derive(Debug, Clone)]
pub struct PrefixCounter {
    table: LeafTable,
}

impl PrefixCounter {
    pub fn new(horizon: &Horizon) -> Self {
        Self {
            table: LeafTable::new(horizon),
        }
    }

    pub fn horizon(&self) -> &Horizon {
        self.table.horizon()
    }

    pub fn total(&self) -> BigUint {
        self.table.total()
    }

    pub fn count_upto(&self, x: f64) -> Result<BigUint> {
        let h = self.horizon();
        let top = h.scale();
        if !(x >= -position_slack(0.0) && x <= top + position_slack(top)) {
            return param(format!("x = {x} outside [0, {top}]"));
        }
        let x = x + position_slack(x);
        let mut count = BigUint::default();
        let mut node = LengthExponent::UNIT;
        let mut pos = 0.0;
        while self.table.is_internal(node) {
            let left = node.alpha_child();
            let split = pos + h.length(left);
            if split <= x {
                count += self.table.leaves(left);
                node = node.complement_child();
                pos = split;
            } else {
                node = left;
            }
        }
        if pos <= x {
            count += 1u32;
        }
        Ok(count)
    }
}

pub fn prefix_count(alpha: f64, t: f64, x: f64) -> Result<BigUint> {
    let rule = KakutaniRule::new(alpha)?;
    PrefixCounter::new(&rule.horizon(FlowTime::Real(t))?).count_upto(x)
}
