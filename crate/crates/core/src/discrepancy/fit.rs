use std::fmt::Write;

use serde::Serialize;

use super::DiscrepancySeries;
use crate::engine::export::xml_escape;
use crate::error::{param, Result};

/// Floor applied before taking logs of discrepancies.
const LOG_FLOOR: f64 = 1e-12;
/// Log residuals below this RMS (about 5% relative error) count as noise, so
/// nearly flat series are not credited to a model with a tiny exponent.
const NOISE_RMS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// max_disc ≈ c.
    Constant,
    /// max_disc ≈ c·W^γ.
    PowerLaw,
    /// max_disc ≈ c·W/log W.
    WOverLogW,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFit {
    pub model: GrowthModel,
    pub c: f64,
    /// γ for the power law.
    pub exponent: Option<f64>,
    /// Sum of squared residuals of log(max_disc).
    pub residual: f64,
    pub parameters: usize,
    /// N·log(max(residual/N, noise²)) + parameters·log N; smaller is better.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    pub models: Vec<ModelFit>,
    pub best: GrowthModel,
    /// Power-law exponent γ.
    pub exponent: f64,
    /// Ordinary least squares of max_disc on W/log W: slope, intercept, R².
    pub linear_w_over_log_w: (f64, f64, f64),
    /// Finite scans cannot certify boundedness or growth.
    pub heuristic: bool,
}

impl GrowthFit {
    pub fn model(&self, m: GrowthModel) -> &ModelFit {
        self.models.iter().find(|f| f.model == m).unwrap()
    }

    /// residual(a) / residual(b).
    pub fn residual_ratio(&self, a: GrowthModel, b: GrowthModel) -> f64 {
        self.model(a).residual / self.model(b).residual.max(f64::MIN_POSITIVE)
    }
}

/// Fits the three growth models in log space and picks the lowest score;
/// on near-ties the model with fewer parameters wins.
pub fn growth_fit(series: &DiscrepancySeries) -> Result<GrowthFit> {
    let w = &series.window_sizes;
    if w.len() < 8 {
        return param(format!(
            "growth fit needs at least 8 windows, got {}",
            w.len()
        ));
    }
    if w[w.len() - 1] / w[0] < 16.0 {
        return param("growth fit needs windows spanning at least four doublings");
    }
    if w[0] <= 1.0 {
        return param("growth fit needs windows larger than 1");
    }
    let n = w.len() as f64;
    let ly: Vec<f64> = series
        .max_disc
        .iter()
        .map(|&v| v.max(LOG_FLOOR).ln())
        .collect();
    let lw: Vec<f64> = w.iter().map(|x| x.ln()).collect();
    let lwl: Vec<f64> = w.iter().map(|x| x.ln() - x.ln().ln()).collect();

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let ssr = |pred: &dyn Fn(usize) -> f64| {
        (0..ly.len())
            .map(|i| (ly[i] - pred(i)).powi(2))
            .sum::<f64>()
    };
    let score = |r: f64, p: usize| n * (r / n).max(NOISE_RMS * NOISE_RMS).ln() + p as f64 * n.ln();

    let c0 = mean(&ly);
    let r0 = ssr(&|_| c0);

    let (mx, my) = (mean(&lw), mean(&ly));
    let sxx: f64 = lw.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lw.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let gamma = sxy / sxx;
    let lc = my - gamma * mx;
    let r1 = ssr(&|i| lc + gamma * lw[i]);

    let c2 = mean(&ly.iter().zip(&lwl).map(|(y, x)| y - x).collect::<Vec<_>>());
    let r2 = ssr(&|i| c2 + lwl[i]);

    let models = vec![
        ModelFit {
            model: GrowthModel::Constant,
            c: c0.exp(),
            exponent: None,
            residual: r0,
            parameters: 1,
            score: score(r0, 1),
        },
        ModelFit {
            model: GrowthModel::PowerLaw,
            c: lc.exp(),
            exponent: Some(gamma),
            residual: r1,
            parameters: 2,
            score: score(r1, 2),
        },
        ModelFit {
            model: GrowthModel::WOverLogW,
            c: c2.exp(),
            exponent: None,
            residual: r2,
            parameters: 1,
            score: score(r2, 1),
        },
    ];
    let mut best = &models[0];
    for m in &models[1..] {
        if m.score < best.score - 2.0 {
            best = m;
        }
    }

    let xs: Vec<f64> = w.iter().map(|x| x / x.ln()).collect();
    let ys = &series.max_disc;
    let (mx, my) = (mean(&xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2_lin = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        0.0
    };

    Ok(GrowthFit {
        best: best.model,
        models,
        exponent: gamma,
        linear_w_over_log_w: (slope, my - slope * mx, r2_lin),
        heuristic: true,
    })
}

/// Log-log plot of max_disc against window size.
pub fn loglog_svg(series: &DiscrepancySeries, description: Option<&str>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 40.0;
    let xs: Vec<f64> = series.window_sizes.iter().map(|x| x.log10()).collect();
    let ys: Vec<f64> = series
        .max_disc
        .iter()
        .map(|y| y.max(LOG_FLOOR).log10())
        .collect();
    let range = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    if let Some(d) = description {
        writeln!(out, "<desc>{}</desc>", xml_escape(d)).unwrap();
    }
    writeln!(
        out,
        r#"<path d="M{M} {M} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - M,
        r = W - M
    )
    .unwrap();
    let pts: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#4e79a7" stroke-width="2"/>"##,
        pts.join(" ")
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12">log10 W: {x0:.2} .. {x1:.2}</text>"#,
        M,
        H - 10.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12">log10 max_disc: {y0:.2} .. {y1:.2}</text>"#,
        M, 20.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}
