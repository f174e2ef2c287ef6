//! Falling factorials, binomial and multinomial coefficients, Stirling
//! triangles, and exponential partial Bell polynomials.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, Coeff, Lambda, Rational};
use crate::error::{Error, Result};
use crate::series::{binom_lambda_series, degenerate_exp_series, TruncatedSeries};

/// `(x)_n = x(x-1)⋯(x-n+1)`, with `(x)_0 = 1`.
pub fn falling_factorial<C: Coeff>(x: &C, n: usize) -> C {
    (0..n).fold(C::one(), |acc, j| {
        acc * &(x.clone() - C::from_int(j as i64))
    })
}

/// `(x)_{n,λ} = x(x-λ)⋯(x-(n-1)λ)`, with `(x)_{0,λ} = 1`.
pub fn generalized_falling<C: Coeff>(lambda: &Lambda<C>, x: &C, n: usize) -> C {
    (0..n).fold(C::one(), |acc, j| {
        acc * &(x.clone() - lambda.value().scale(&rat(j as i64)))
    })
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn factorial_rat(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: usize, k: i64) -> Rational {
    if k < 0 || k as usize > n {
        return Rational::zero();
    }
    let k = (k as usize).min(n - k as usize);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Rational::from_integer(acc)
}

/// `n! / (m_1! ⋯ m_k!)`; the parts must sum to `n`.
pub fn multinomial(n: usize, parts: &[usize]) -> Result<Rational> {
    if parts.iter().sum::<usize>() != n {
        return Err(Error::OutOfRange(format!(
            "multinomial parts {parts:?} do not sum to {n}"
        )));
    }
    let denom = parts
        .iter()
        .fold(BigInt::one(), |acc, &m| acc * factorial(m));
    Ok(Rational::new(factorial(n), denom))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StirlingKind {
    FirstSigned,
    DegenerateSecond,
    /// `λ^{n-k} S_{2,1/λ}(n,k)`, which lives in ℚ[λ].
    ScaledDegenerateSecond,
}

/// Triangular table `(n, k)`, `0 ≤ k ≤ n ≤ n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct StirlingTable<C> {
    kind: StirlingKind,
    rows: Vec<Vec<C>>,
}

impl<C: Coeff> StirlingTable<C> {
    pub fn kind(&self) -> StirlingKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// Entry `(n, k)`; zero above the diagonal.
    pub fn get(&self, n: usize, k: usize) -> C {
        if k > n {
            return C::zero();
        }
        self.rows[n][k].clone()
    }

    pub fn row(&self, n: usize) -> &[C] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<C>] {
        &self.rows
    }

    /// Wraps explicit rows; row `n` must have `n + 1` entries.
    pub fn from_rows(kind: StirlingKind, rows: Vec<Vec<C>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::OutOfRange("a triangle needs at least row 0".into()));
        }
        if let Some(n) = rows.iter().enumerate().position(|(n, r)| r.len() != n + 1) {
            return Err(Error::OutOfRange(format!(
                "row {n} must have {} entries",
                n + 1
            )));
        }
        Ok(StirlingTable { kind, rows })
    }

    fn from_fn(kind: StirlingKind, n_max: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let rows = (0..=n_max)
            .map(|n| (0..=n).map(|k| f(n, k)).collect())
            .collect();
        StirlingTable { kind, rows }
    }
}

/// Signed Stirling numbers of the first kind, `s(n+1,k) = s(n,k-1) - n s(n,k)`.
pub fn stirling1_signed<C: Coeff>(n_max: usize) -> StirlingTable<C> {
    let mut rows: Vec<Vec<C>> = vec![vec![C::one()]];
    for n in 0..n_max {
        let prev = &rows[n];
        let row = (0..=n + 1)
            .map(|k| {
                let mut v = if k > 0 {
                    prev[k - 1].clone()
                } else {
                    C::zero()
                };
                if k <= n {
                    v -= &prev[k].scale(&rat(n as i64));
                }
                v
            })
            .collect();
        rows.push(row);
    }
    StirlingTable {
        kind: StirlingKind::FirstSigned,
        rows,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stirling2Route {
    /// `n!/k! · [t^n] (e_λ(t) - 1)^k`.
    GeneratingFunction,
    /// `(-1)^k/k! Σ_l (-1)^l C(k,l) (l)_{n,λ}`.
    BellFormula,
}

/// Degenerate Stirling numbers of the second kind `S_{2,λ}(n,k)`.
pub fn degenerate_stirling2<C: Coeff>(
    lambda: &Lambda<C>,
    n_max: usize,
    via: Stirling2Route,
) -> StirlingTable<C> {
    let kind = StirlingKind::DegenerateSecond;
    match via {
        Stirling2Route::GeneratingFunction => {
            let order = n_max + 1;
            let mut e_minus_one = degenerate_exp_series(lambda, order);
            let head = e_minus_one.coeffs()[0].clone() - C::one();
            let mut coeffs = e_minus_one.coeffs().to_vec();
            coeffs[0] = head;
            e_minus_one = TruncatedSeries::new(coeffs);

            let mut power = TruncatedSeries::one(order);
            let mut columns = Vec::with_capacity(order);
            for k in 0..=n_max {
                if k > 0 {
                    power = &power * &e_minus_one;
                }
                columns.push(power.clone());
            }
            StirlingTable::from_fn(kind, n_max, |n, k| {
                let scale = Rational::new(factorial(n), factorial(k));
                columns[k].coeff(n).scale(&scale)
            })
        }
        Stirling2Route::BellFormula => StirlingTable::from_fn(kind, n_max, |n, k| {
            let mut acc = C::zero();
            for l in 0..=k {
                let term = generalized_falling(lambda, &C::from_int(l as i64), n)
                    .scale(&binomial(k, l as i64));
                if l % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            acc.scale(&(rat(sign) / factorial_rat(k)))
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellRoute {
    /// Sum over `i_1+…+i_{n-k+1} = k`, `i_1+2i_2+… = n`.
    PartitionSum,
    /// `n!/k! · [t^n] (Σ x_i t^i/i!)^k`.
    GeneratingFunction,
}

/// Visits every `(i_1, …, i_m)` with `Σ i_l = k` and `Σ l·i_l = n`, in
/// lexicographic order.
pub fn for_each_bell_partition(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    if n == 0 {
        visit(&[]);
        return;
    }
    if k == 0 {
        return;
    }
    let m = n - k + 1;
    let mut counts = vec![0usize; m];

    fn rec(
        idx: usize,
        parts_left: usize,
        weight_left: usize,
        counts: &mut [usize],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let size = idx + 1;
        if idx == counts.len() {
            if parts_left == 0 && weight_left == 0 {
                visit(counts);
            }
            return;
        }
        let max = parts_left.min(weight_left / size);
        for c in 0..=max {
            // Remaining parts are at least `size + 1` each.
            let rest_parts = parts_left - c;
            let rest_weight = weight_left - c * size;
            if rest_weight < rest_parts * (size + 1) && !(rest_parts == 0 && rest_weight == 0) {
                continue;
            }
            counts[idx] = c;
            rec(idx + 1, rest_parts, rest_weight, counts, visit);
        }
        counts[idx] = 0;
    }

    rec(0, k, n, &mut counts, &mut visit);
}

/// Exponential partial Bell polynomial `B_{n,k}(x_1, …, x_{n-k+1})`.
pub fn bell_partial<C: Coeff>(n: usize, k: usize, xs: &[C], via: BellRoute) -> Result<C> {
    if k > n {
        return Err(Error::OutOfRange(format!("B_{{{n},{k}}} needs n >= k")));
    }
    let needed = if k == 0 { 0 } else { n - k + 1 };
    if xs.len() < needed {
        return Err(Error::OutOfRange(format!(
            "B_{{{n},{k}}} needs {needed} arguments, got {}",
            xs.len()
        )));
    }
    if k == 0 {
        return Ok(if n == 0 { C::one() } else { C::zero() });
    }
    Ok(match via {
        BellRoute::PartitionSum => {
            let n_fact = factorial(n);
            let mut acc = C::zero();
            for_each_bell_partition(n, k, |counts| {
                let mut denom = BigInt::one();
                let mut product = C::one();
                for (idx, &c) in counts.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let l = idx + 1;
                    denom *= factorial(c) * factorial(l).pow(c as u32);
                    product = product * &xs[idx].pow(c);
                }
                acc += &product.scale(&Rational::new(n_fact.clone(), denom));
            });
            acc
        }
        BellRoute::GeneratingFunction => {
            let order = n + 1;
            let mut coeffs = vec![C::zero(); order];
            for i in 1..=needed {
                coeffs[i] = xs[i - 1].scale(&Rational::new(BigInt::one(), factorial(i)));
            }
            let s = TruncatedSeries::new(coeffs).pow(k);
            s.coeff(n).scale(&Rational::new(factorial(n), factorial(k)))
        }
    })
}

/// Checks `B_{n,k}(ab x_1, ab² x_2, …) = a^k b^n B_{n,k}(x_1, …)` exactly.
pub fn bell_scaling_check<C: Coeff>(n: usize, k: usize, a: &C, b: &C, xs: &[C]) -> Result<bool> {
    let scaled: Vec<C> = xs
        .iter()
        .enumerate()
        .map(|(idx, x)| a.mul_ref(&b.pow(idx + 1)).mul_ref(x))
        .collect();
    let lhs = bell_partial(n, k, &scaled, BellRoute::PartitionSum)?;
    let rhs = a.pow(k) * &b.pow(n) * &bell_partial(n, k, xs, BellRoute::PartitionSum)?;
    Ok(lhs == rhs)
}

/// Arguments `1, (λ-1), (λ-1)(λ-2), …` of length `len`.
fn shifted_falling_args<C: Coeff>(lambda: &Lambda<C>, len: usize) -> Vec<C> {
    let lm1 = lambda.value().clone() - C::one();
    (0..len).map(|i| falling_factorial(&lm1, i)).collect()
}

/// `λ^{N-k} S_{2,1/λ}(N,k)`, computed as `B_{N,k}(1, (λ-1), (λ-1)(λ-2), …)`.
pub fn scaled_degenerate_stirling<C: Coeff>(lambda: &Lambda<C>, big_n: usize, k: usize) -> C {
    if k > big_n {
        return C::zero();
    }
    let len = if k == 0 { 0 } else { big_n - k + 1 };
    bell_partial(
        big_n,
        k,
        &shifted_falling_args(lambda, len),
        BellRoute::PartitionSum,
    )
    .expect("argument vector has the required length")
}

/// The same quantity through `(1/k!)(log_λ(1+t))^k`, i.e.
/// `N!/k! · λ^{-k} [t^N] ((1+t)^λ - 1)^k`, with the division by `λ^k`
/// checked to be exact.
pub fn scaled_degenerate_stirling_gf<C: Coeff>(
    lambda: &Lambda<C>,
    big_n: usize,
    k: usize,
) -> Result<C> {
    if k > big_n {
        return Ok(C::zero());
    }
    let order = big_n + 1;
    let mut coeffs = binom_lambda_series(lambda, order).coeffs().to_vec();
    coeffs[0] = C::zero();
    let c = TruncatedSeries::new(coeffs).pow(k).coeff(big_n).clone();
    let quotient = lambda.div_pow(&c, k)?;
    Ok(quotient.scale(&Rational::new(factorial(big_n), factorial(k))))
}

pub fn scaled_degenerate_stirling_table<C: Coeff>(
    lambda: &Lambda<C>,
    n_max: usize,
) -> StirlingTable<C> {
    StirlingTable::from_fn(StirlingKind::ScaledDegenerateSecond, n_max, |n, k| {
        scaled_degenerate_stirling(lambda, n, k)
    })
}
