use std::fmt::Write;

use serde_json::{json, Value};

use super::{PrimitiveRule, SubstitutionMatrix};

/// Prototiles as `{label, theta_exponent, length}` plus the image map.
pub fn rule_json(rule: &PrimitiveRule) -> Value {
    let prototiles: Vec<Value> = (1..=rule.size() as u32)
        .map(|j| {
            json!({
                "label": j,
                "theta_exponent": rule.depth(j),
                "length": rule.theta().powi(rule.depth(j) as i32),
                "image": rule.image(j).iter().map(|c| json!({
                    "label": c.label,
                    "offset_theta_exponents": c.offset,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "loops": rule.loops(),
        "xi": rule.xi(),
        "prototiles": prototiles,
    })
}

/// Row-major integer array.
pub fn matrix_json(m: &SubstitutionMatrix) -> Value {
    json!(m.entries())
}

/// G'_α: one node per prototile, an edge from each vertex to the next along its loop.
pub fn rule_dot(rule: &PrimitiveRule) -> String {
    let mut out = String::from("digraph G {\n  rankdir=LR;\n");
    for j in 1..=rule.size() as u32 {
        writeln!(out, "  {j} [label=\"T{j}\"];").unwrap();
    }
    for j in 1..=rule.size() as u32 {
        for c in rule.image(j) {
            writeln!(out, "  {j} -> {};", c.label).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
