//! Dense univariate polynomials over ℤ with arbitrary-precision coefficients.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// Integer polynomial, constant term first. The zero polynomial has no
/// coefficients; otherwise the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Sum of signed monomials `sign · x^exp`.
    pub fn from_terms(terms: &[(i64, usize)]) -> Self {
        let deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut c = vec![BigInt::zero(); deg + 1];
        for &(k, e) in terms {
            c[e] += k;
        }
        Self::new(c)
    }

    pub fn monomial(exp: usize) -> Self {
        Self::from_terms(&[(1, exp)])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn nonzero_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Splits off the largest power of x: returns `(s, q)` with `self = x^s · q`.
    pub fn strip_x_power(&self) -> (usize, IntPolynomial) {
        let s = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if s == self.coeffs.len() {
            return (0, self.clone());
        }
        (s, IntPolynomial::new(self.coeffs[s..].to_vec()))
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..len).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    /// Long division by a divisor with leading coefficient ±1; stays in ℤ[x].
    /// Returns `None` for other divisors.
    pub fn div_rem(&self, divisor: &IntPolynomial) -> Option<(IntPolynomial, IntPolynomial)> {
        let lead = divisor.leading();
        if divisor.is_zero() || !lead.abs().is_one() {
            return None;
        }
        if self.degree() < divisor.degree() || self.is_zero() {
            return Some((IntPolynomial::default(), self.clone()));
        }
        let dd = divisor.degree();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        Some((IntPolynomial::new(quot), IntPolynomial::new(rem)))
    }

    pub fn is_divisible_by(&self, divisor: &IntPolynomial) -> bool {
        self.div_rem(divisor).is_some_and(|(_, r)| r.is_zero())
    }

    /// Detects the shape x^a − x^b − 1 with a > b ≥ 1.
    pub fn as_kakutani_trinomial(&self) -> Option<(usize, usize)> {
        if self.nonzero_terms() != 3 || self.coeff(0) != BigInt::from(-1) {
            return None;
        }
        let a = self.degree();
        if !self.leading().is_one() {
            return None;
        }
        let b = (1..a).find(|&i| !self.coeffs[i].is_zero())?;
        (self.coeffs[b] == BigInt::from(-1)).then_some((a, b))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| {
            acc * z + c.to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Integer roots; for a polynomial with nonzero constant term these divide it.
    pub fn integer_roots(&self) -> Vec<BigInt> {
        let (s, q) = self.strip_x_power();
        let mut roots = Vec::new();
        if s > 0 {
            roots.push(BigInt::zero());
        }
        let c0 = q.coeff(0).abs();
        if let Some(c0) = c0.to_u64() {
            if c0 <= 1 << 20 {
                for d in (1..=c0).filter(|d| c0 % d == 0) {
                    for cand in [BigInt::from(d), -BigInt::from(d)] {
                        if q.eval_int(&cand).is_zero() {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = !mag.is_one() || e == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

/// The j-th cyclotomic polynomial Φ_j, via x^j − 1 = ∏_{d | j} Φ_d.
pub fn cyclotomic(j: u32) -> IntPolynomial {
    assert!(j > 0, "cyclotomic index must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u32, IntPolynomial>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&j) {
        return p.clone();
    }
    let mut p = IntPolynomial::from_terms(&[(1, j as usize), (-1, 0)]);
    for d in (1..j).filter(|d| j.is_multiple_of(*d)) {
        let (q, r) = p
            .div_rem(&cyclotomic(d))
            .expect("cyclotomic polynomials are monic");
        debug_assert!(r.is_zero());
        p = q;
    }
    cache.lock().unwrap().insert(j, p.clone());
    p
}
