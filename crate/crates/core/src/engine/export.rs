use std::fmt::Write;

use serde::Serialize;

use super::patch::PointSet;

/// A tile evaluated to reals for output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TileRecord {
    pub position: f64,
    pub length: f64,
    pub label: Option<u32>,
}

/// `position,length,label` rows; the label column is empty for unlabelled tiles.
pub fn patch_csv(tiles: &[TileRecord]) -> String {
    let mut out = String::from("position,length,label\n");
    for t in tiles {
        let label = t.label.map(|l| l.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{}", t.position, t.length, label).unwrap();
    }
    out
}

pub fn point_set_csv(points: &PointSet) -> String {
    let mut out = String::from("position\n");
    for p in points.points() {
        writeln!(out, "{p}").unwrap();
    }
    out
}

const SVG_WIDTH: f64 = 1000.0;
const BAR_HEIGHT: f64 = 40.0;
const MARGIN: f64 = 10.0;
const PALETTE: [&str; 6] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
];

/// One bar per tile, x-axis to scale, uniform height. Labelled tiles are
/// coloured by label, unlabelled ones alternate.
pub fn patch_svg(tiles: &[TileRecord], description: Option<&str>) -> String {
    let left = tiles.first().map_or(0.0, |t| t.position);
    let right = tiles.last().map_or(1.0, |t| t.position + t.length);
    let k = SVG_WIDTH / (right - left).max(f64::MIN_POSITIVE);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = SVG_WIDTH + 2.0 * MARGIN,
        h = BAR_HEIGHT + 2.0 * MARGIN
    )
    .unwrap();
    if let Some(d) = description {
        writeln!(out, "<desc>{}</desc>", xml_escape(d)).unwrap();
    }
    for (i, t) in tiles.iter().enumerate() {
        let colour = match t.label {
            Some(l) => PALETTE[(l as usize).saturating_sub(1) % PALETTE.len()],
            None => PALETTE[i % 2],
        };
        writeln!(
            out,
            r#"<rect x="{:.4}" y="{MARGIN}" width="{:.4}" height="{BAR_HEIGHT}" fill="{colour}" stroke="black" stroke-width="0.5"/>"#,
            MARGIN + (t.position - left) * k,
            t.length * k,
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

pub(crate) fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
