//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the crate's algorithms: each oracle works directly
//! on `BigRational` with its own naive series code.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qq(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn fact(n: usize) -> Q {
    (1..=n as i64).fold(Q::one(), |acc, k| acc * q(k))
}

/// Naive power-series inverse by long division.
pub fn inverse(a: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::with_capacity(a.len());
    for n in 0..a.len() {
        let mut rhs = if n == 0 { Q::one() } else { Q::zero() };
        for k in 1..=n {
            rhs -= &a[k] * &out[n - k];
        }
        out.push(rhs / &a[0]);
    }
    out
}

/// `n!·[t^n] t/log(1+t)` for `n ≤ n_max`.
pub fn classical_b(n_max: usize) -> Vec<Q> {
    let log_over_t: Vec<Q> = (0..=n_max)
        .map(|m| {
            let v = qq(1, m as i64 + 1);
            if m % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    inverse(&log_over_t)
        .into_iter()
        .enumerate()
        .map(|(n, c)| c * fact(n))
        .collect()
}

/// `C(x, k) = x(x-1)…(x-k+1)/k!` for rational `x`.
pub fn gen_binomial(x: &Q, k: usize) -> Q {
    let mut num = Q::one();
    for i in 0..k {
        num *= x - q(i as i64);
    }
    num / fact(k)
}

/// `n!·[t^n] λt/((1+t)^λ - 1)` at a fixed nonzero rational λ, `n ≤ n_max`.
pub fn degenerate_b_at(lambda: &Q, n_max: usize) -> Vec<Q> {
    // ((1+t)^λ - 1)/(λt) = Σ C(λ, n+1)/λ · t^n.
    let quotient: Vec<Q> = (0..=n_max)
        .map(|n| gen_binomial(lambda, n + 1) / lambda)
        .collect();
    inverse(&quotient)
        .into_iter()
        .enumerate()
        .map(|(n, c)| c * fact(n))
        .collect()
}

/// Ascending coefficients of the interpolating polynomial through `points`.
pub fn interpolate(points: &[(Q, Q)]) -> Vec<Q> {
    let m = points.len();
    let mut out = vec![Q::zero(); m];
    for (i, (xi, yi)) in points.iter().enumerate() {
        // Basis polynomial Π_{j≠i} (x - x_j)/(x_i - x_j).
        let mut basis = vec![Q::one()];
        let mut denom = Q::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![Q::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * xj;
            }
            basis = next;
            denom *= xi - xj;
        }
        for (k, c) in basis.iter().enumerate() {
            out[k] += c * yi / &denom;
        }
    }
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

/// `b_{n,λ}` as polynomials in λ, from the fixed-λ oracle at `n_max + 2`
/// sample points (`b_{n,λ}` has degree at most `n`).
pub fn degenerate_b_symbolic(n_max: usize) -> Vec<Vec<Q>> {
    let xs: Vec<Q> = (1..=n_max as i64 + 2).map(|k| qq(k, 3)).collect();
    let samples: Vec<Vec<Q>> = xs.iter().map(|x| degenerate_b_at(x, n_max)).collect();
    (0..=n_max)
        .map(|n| {
            let pts: Vec<(Q, Q)> = xs
                .iter()
                .zip(&samples)
                .map(|(x, row)| (x.clone(), row[n].clone()))
                .collect();
            interpolate(&pts)
        })
        .collect()
}

/// Signed Stirling numbers of the first kind by expanding `x(x-1)…(x-n+1)`.
pub fn stirling1(n_max: usize) -> Vec<Vec<Q>> {
    (0..=n_max)
        .map(|n| {
            let mut poly = vec![Q::one()];
            for i in 0..n {
                let mut next = vec![Q::zero(); poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * q(i as i64);
                }
                poly = next;
            }
            poly
        })
        .collect()
}
