use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::PrimitiveRule;
use crate::poly::IntPolynomial;

/// Square non-negative integer matrix; column j counts the children of T_j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubstitutionMatrix {
    entries: Vec<Vec<u64>>,
}

impl SubstitutionMatrix {
    pub fn new(entries: Vec<Vec<u64>>) -> Self {
        let k = entries.len();
        assert!(
            entries.iter().all(|r| r.len() == k),
            "matrix must be square"
        );
        Self { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    /// 1ᵀM.
    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.size())
            .map(|j| self.entries.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect()
    }

    fn to_big(&self) -> Vec<Vec<BigUint>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&v| BigUint::from(v)).collect())
            .collect()
    }

    /// M^ℓ over arbitrary-precision integers, by repeated squaring.
    pub fn power(&self, ell: u32) -> Vec<Vec<BigUint>> {
        let k = self.size();
        let mut result: Vec<Vec<BigUint>> = (0..k)
            .map(|i| (0..k).map(|j| BigUint::from((i == j) as u8)).collect())
            .collect();
        let mut base = self.to_big();
        let mut e = ell;
        while e > 0 {
            if e & 1 == 1 {
                result = big_mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = big_mul(&base, &base);
            }
        }
        result
    }

    /// Smallest ℓ ≤ k² with M^ℓ entrywise positive, if any.
    pub fn primitivity_exponent(&self) -> Option<u32> {
        let k = self.size();
        let pattern: Vec<Vec<bool>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&v| v > 0).collect())
            .collect();
        let mut acc = pattern.clone();
        for ell in 1..=(k * k).max(1) as u32 {
            if acc.iter().flatten().all(|&b| b) {
                return Some(ell);
            }
            acc = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| (0..k).any(|s| acc[i][s] && pattern[s][j]))
                        .collect()
                })
                .collect();
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }
}

fn big_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let k = a.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut s = BigUint::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s += &a[i][t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// a_ij = number of copies of ξ^{-1}T_i in ρ(T_j).
#[allow(clippy::needless_range_loop)]
pub fn substitution_matrix(rule: &PrimitiveRule) -> SubstitutionMatrix {
    let k = rule.size();
    let mut entries = vec![vec![0u64; k]; k];
    for j in 0..k {
        for c in rule.image(j as u32 + 1) {
            entries[c.label as usize - 1][j] += 1;
        }
    }
    SubstitutionMatrix::new(entries)
}

/// det(xI − M) by Berkowitz's division-free recurrence.
pub fn char_poly(mat: &SubstitutionMatrix) -> IntPolynomial {
    let a: Vec<Vec<BigInt>> = mat
        .entries
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    // Coefficients, highest degree first, of the char poly of the leading r×r block.
    let mut vect = vec![BigInt::one()];
    for r in 0..a.len() {
        // Toeplitz column: 1, −a_rr, −R·C, −R·S·C, −R·S²·C, …
        let mut t = vec![BigInt::one(), -a[r][r].clone()];
        let mut sc: Vec<BigInt> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let rc: BigInt = (0..r).map(|i| &a[r][i] * &sc[i]).sum();
            t.push(-rc);
            sc = (0..r)
                .map(|i| (0..r).map(|j| &a[i][j] * &sc[j]).sum())
                .collect();
        }
        let next: Vec<BigInt> = (0..vect.len() + 1)
            .map(|i| {
                (0..vect.len())
                    .filter(|&j| j <= i)
                    .map(|j| &t[i - j] * &vect[j])
                    .sum()
            })
            .collect();
        vect = next;
    }
    vect.reverse();
    IntPolynomial::new(vect)
}

/// Per-prototile counts in (ξρ)^ℓ(I): M^ℓ e_1.
pub fn tile_counts(mat: &SubstitutionMatrix, ell: u32) -> Vec<BigUint> {
    mat.power(ell)
        .into_iter()
        .map(|row| row[0].clone())
        .collect()
}
