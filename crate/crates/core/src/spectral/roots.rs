use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::poly::IntPolynomial;

const MAX_ITERATIONS: usize = 1000;
const POLISH_STEPS: usize = 8;
/// Fixed rotation of the starting circle; keeps starts off the real axis.
const START_ROTATION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub residual: f64,
}

impl Root {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Largest residual accepted for a root z of a degree-d polynomial.
pub fn residual_bound(z: Complex64, degree: usize) -> f64 {
    1e-12 * (1.0 + z.norm()).powi(degree as i32)
}

/// All complex roots with multiplicity, by Aberth–Ehrlich simultaneous
/// iteration from a rotated Cauchy-bound circle, then per-root Newton polish.
/// Sorted by decreasing modulus, ties by argument.
pub fn find_roots(p: &IntPolynomial) -> Result<Vec<Root>> {
    if p.is_zero() || p.degree() == 0 {
        return param("root finding needs degree at least 1");
    }
    let (zeros, q) = p.strip_x_power();
    let deg = p.degree();
    let mut roots: Vec<Complex64> = vec![Complex64::zero(); zeros];
    if q.degree() > 0 {
        roots.extend(aberth(&q)?);
    }
    let mut out = Vec::with_capacity(roots.len());
    for z in roots {
        let residual = p.eval_complex(z).norm();
        if residual >= residual_bound(z, deg) {
            return Err(Error::Numeric(format!(
                "root {z} of {p} has residual {residual:e} after {MAX_ITERATIONS} iterations"
            )));
        }
        out.push(Root {
            re: z.re,
            im: z.im,
            modulus: z.norm(),
            residual,
        });
    }
    out.sort_by(|a, b| {
        b.modulus
            .total_cmp(&a.modulus)
            .then(b.im.atan2(b.re).total_cmp(&a.im.atan2(a.re)))
    });
    Ok(out)
}

fn aberth(q: &IntPolynomial) -> Result<Vec<Complex64>> {
    let c = q.to_f64();
    let d = c.len() - 1;
    let lead = c[d];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let deriv: Vec<f64> = (1..=d).map(|i| monic[i] * i as f64).collect();
    let eval = |cs: &[f64], z: Complex64| {
        cs.iter()
            .rev()
            .fold(Complex64::zero(), |acc, &a| acc * z + a)
    };

    let radius = 1.0 + monic[..d].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / d as f64 + START_ROTATION))
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut biggest = 0.0f64;
        for k in 0..d {
            let pz = eval(&monic, z[k]);
            if pz.is_zero() {
                continue;
            }
            let ratio = pz / eval(&deriv, z[k]);
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if w.is_finite() {
                z[k] -= w;
                biggest = biggest.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if biggest < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged
        && z.iter()
            .any(|r| eval(&monic, *r).norm() >= residual_bound(*r, d))
    {
        return Err(Error::Numeric(format!(
            "Aberth iteration on {q} did not converge in {MAX_ITERATIONS} steps"
        )));
    }

    for r in z.iter_mut() {
        let mut best = eval(&monic, *r).norm();
        for _ in 0..POLISH_STEPS {
            let step = eval(&monic, *r) / eval(&deriv, *r);
            let cand = *r - step;
            let res = eval(&monic, cand).norm();
            if !step.is_finite() || res >= best {
                break;
            }
            *r = cand;
            best = res;
        }
        // Real coefficients: a root this close to the axis is real.
        if r.im.abs() < 1e-12 * (1.0 + r.re.abs()) {
            let real = Complex64::new(r.re, 0.0);
            if eval(&monic, real).norm() <= best.max(residual_bound(real, d) * 1e-3) {
                *r = real;
            }
        }
    }
    Ok(z)
}
