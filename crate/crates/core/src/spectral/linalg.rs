use num_complex::Complex64;
use num_traits::Zero;

use crate::cover::SubstitutionMatrix;
use crate::error::{param, Result};

/// Relative pivot threshold for numeric rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-9;
/// |𝟏ᵀv| must exceed this multiple of ‖v‖ for v to count as not perpendicular.
pub const PERP_TOLERANCE: f64 = 1e-9;

/// Basis of ker(A) by reduced row echelon form with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn null_space(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = RANK_TOLERANCE * scale;
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, norm) = (r..rows)
            .map(|i| (i, m[i][c].norm()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm <= tol {
            continue;
        }
        m.swap(r, best);
        let p = m[r][c];
        for v in m[r].iter_mut() {
            *v /= p;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let s = m[r][j];
                    m[i][j] -= f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Complex64::zero(); cols];
            v[free] = Complex64::new(1.0, 0.0);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][free];
            }
            v
        })
        .collect()
}

fn shifted(mat: &SubstitutionMatrix, lambda: Complex64, transpose: bool) -> Vec<Vec<Complex64>> {
    let k = mat.size();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let v = if transpose {
                        mat.get(j, i)
                    } else {
                        mat.get(i, j)
                    };
                    let d = if i == j { lambda } else { Complex64::zero() };
                    Complex64::new(v as f64, 0.0) - d
                })
                .collect()
        })
        .collect()
}

/// Right eigenspace basis of λ; errors if λ is not an eigenvalue.
pub fn eigenspace(mat: &SubstitutionMatrix, lambda: Complex64) -> Result<Vec<Vec<Complex64>>> {
    let basis = null_space(&shifted(mat, lambda, false));
    if basis.is_empty() {
        return param(format!("{lambda} is not an eigenvalue within tolerance"));
    }
    Ok(basis)
}

/// Whether the eigenspace of λ contains some v with 𝟏ᵀv ≠ 0.
pub fn eigenspace_not_perp(mat: &SubstitutionMatrix, lambda: Complex64) -> Result<bool> {
    Ok(eigenspace(mat, lambda)?.iter().any(|v| {
        let sum: Complex64 = v.iter().sum();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        sum.norm() > PERP_TOLERANCE * norm
    }))
}

/// Positive right and left eigenvectors of the real eigenvalue λ₁,
/// normalised to sum 1.
pub fn perron_vectors(mat: &SubstitutionMatrix, lambda1: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let pick = |transpose: bool| -> Result<Vec<f64>> {
        let basis = null_space(&shifted(mat, Complex64::new(lambda1, 0.0), transpose));
        let Some(v) = basis.first() else {
            return param(format!("{lambda1} is not an eigenvalue within tolerance"));
        };
        let sum: f64 = v.iter().map(|z| z.re).sum();
        Ok(v.iter().map(|z| z.re / sum).collect())
    };
    Ok((pick(false)?, pick(true)?))
}
