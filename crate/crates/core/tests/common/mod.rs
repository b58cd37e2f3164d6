//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numerics.
#![allow(dead_code)]

/// Root of a continuous `f` on [lo, hi] with a sign change, by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// α in (0, 1/2] with α^m = (1−α)^n.
pub fn alpha_oracle(n: u32, m: u32) -> f64 {
    bisect(|a| a.powi(m as i32) - (1.0 - a).powi(n as i32), 1e-300, 0.5)
}

/// Perron root of x^n − x^{n−m} − 1 on (1, 2].
pub fn perron_oracle(n: u32, m: u32) -> f64 {
    bisect(
        |x| x.powi(n as i32) - x.powi((n - m) as i32) - 1.0,
        1.0 + 1e-15,
        2.0,
    )
}

/// Tiles of F_{ℓ·g}(I) for the rule n/m: a tile of step length s splits iff
/// s > 0 into pieces of s − n and s − m.
pub fn step_count(n: u32, m: u32, ell: u32) -> u128 {
    let mut memo = vec![0u128; ell as usize + 1];
    for s in 0..=ell as usize {
        let get = |k: i64, memo: &Vec<u128>| if k <= 0 { 1 } else { memo[k as usize] };
        memo[s] = if s == 0 {
            1
        } else {
            get(s as i64 - n as i64, &memo) + get(s as i64 - m as i64, &memo)
        };
    }
    memo[ell as usize]
}

/// Tiles of F_t(I) by direct recursion on real lengths.
pub fn real_count(alpha: f64, t: f64) -> u64 {
    fn go(alpha: f64, l: f64) -> u64 {
        if l <= 1.0 + 1e-12 {
            1
        } else {
            go(alpha, alpha * l) + go(alpha, (1.0 - alpha) * l)
        }
    }
    go(alpha, t.exp())
}

/// det(k·I − M) by fraction-free (Bareiss) elimination over i128.
pub fn det_shifted(mat: &[Vec<u64>], k: i128) -> i128 {
    let n = mat.len();
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (if i == j { k } else { 0 }) - mat[i][j] as i128)
                .collect()
        })
        .collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for p in 0..n {
        if a[p][p] == 0 {
            match (p + 1..n).find(|&r| a[r][p] != 0) {
                Some(r) => {
                    a.swap(p, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
            }
            a[i][p] = 0;
        }
        prev = a[p][p];
    }
    sign * a[n - 1][n - 1]
}

/// Sparse integer polynomial evaluated exactly.
pub fn eval_terms(terms: &[(i128, u32)], x: i128) -> i128 {
    terms.iter().map(|&(c, e)| c * x.pow(e)).sum()
}

pub fn coprime_pairs(max_n: u32) -> Vec<(u32, u32)> {
    let gcd = |mut a: u32, mut b: u32| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut out = Vec::new();
    for n in 2..=max_n {
        for m in 1..n {
            if gcd(n, m) == 1 {
                out.push((n, m));
            }
        }
    }
    out
}
