//! The coefficients `a_{i,λ}(N)` of the differential equations
//!
//! ```text
//! (-1)^N (1+t)^N F^{(N)} = Σ_{i=0}^{N} a_{i,λ}(N) F^{i+1},   F = 1/log_λ(1+t).
//! ```
//!
//! The step recurrence is the reference builder. The unrolled recurrence and
//! the two closed forms (one over falling factorials, one over scaled
//! degenerate Stirling numbers) are independent verification routes.

use num_traits::Zero;

use crate::arith::{rat, Coeff, Lambda, Rational};
use crate::combinatorics::{
    binomial, factorial_rat, falling_factorial, scaled_degenerate_stirling_table, stirling1_signed,
    StirlingTable,
};
use crate::error::{Error, Result};

/// Rows `N = 0..=n_max`; row `N` holds `a_{0,λ}(N), …, a_{N,λ}(N)`.
/// Row 0 is the convention `[1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable<C> {
    rows: Vec<Vec<C>>,
}

impl<C: Coeff> CoeffTable<C> {
    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, big_n: usize) -> &[C] {
        &self.rows[big_n]
    }

    pub fn rows(&self) -> &[Vec<C>] {
        &self.rows
    }

    pub fn get(&self, i: usize, big_n: usize) -> &C {
        &self.rows[big_n][i]
    }

    /// Wraps explicit rows; row `N` must have `N + 1` entries.
    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::OutOfRange("a table needs at least row 0".into()));
        }
        if let Some(n) = rows.iter().enumerate().position(|(n, r)| r.len() != n + 1) {
            return Err(Error::OutOfRange(format!(
                "row {n} must have {} entries",
                n + 1
            )));
        }
        Ok(CoeffTable { rows })
    }

    /// Copy with one entry replaced; used to inject faults in tests.
    pub fn with_entry(mut self, i: usize, big_n: usize, value: C) -> Self {
        self.rows[big_n][i] = value;
        self
    }

    /// Step recurrence from the seeds `a_{0,λ}(1) = λ`, `a_{1,λ}(1) = 1`:
    ///
    /// ```text
    /// a_0(N+1)   = (N+λ) a_0(N)
    /// a_{N+1}(N+1) = (N+1) a_N(N)
    /// a_i(N+1)   = (N+(i+1)λ) a_i(N) + i a_{i-1}(N)
    /// ```
    pub fn by_recurrence(lambda: &Lambda<C>, n_max: usize) -> Self {
        let mut rows = vec![vec![C::one()]];
        if n_max >= 1 {
            rows.push(vec![lambda.value().clone(), C::one()]);
        }
        for n in 1..n_max {
            let prev = &rows[n];
            let mut row = Vec::with_capacity(n + 2);
            row.push(prev[0].clone() * &(C::from_int(n as i64) + lambda.value()));
            for i in 1..=n {
                let factor = C::from_int(n as i64) + &lambda.value().scale(&rat(i as i64 + 1));
                let v = prev[i].clone() * &factor + &prev[i - 1].scale(&rat(i as i64));
                row.push(v);
            }
            row.push(prev[n].scale(&rat(n as i64 + 1)));
            rows.push(row);
        }
        CoeffTable { rows }
    }

    /// Triangle from the unrolled recurrence: `a_0(N) = (N+λ-1)_N`,
    /// `a_N(N) = N!`, and the interior from [`a_alternate_recurrence`]'s sum.
    pub fn by_unrolled_recurrence(lambda: &Lambda<C>, n_max: usize) -> Self {
        let mut rows: Vec<Vec<C>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let v = if i == n {
                    C::from_rational(factorial_rat(n))
                } else if i == 0 {
                    let base = C::from_int(n as i64 - 1) + lambda.value();
                    falling_factorial(&base, n)
                } else {
                    unrolled_entry(lambda, i, n, |ii, nn| rows[nn][ii].clone())
                };
                row.push(v);
            }
            rows.push(row);
        }
        CoeffTable { rows }
    }

    /// Triangle from the closed form over falling factorials.
    pub fn by_falling_form(lambda: &Lambda<C>, n_max: usize) -> Result<Self> {
        let mut rows = vec![vec![C::one()]];
        for n in 1..=n_max {
            rows.push(
                (0..=n)
                    .map(|i| a_explicit_falling(lambda, i, n))
                    .collect::<Result<_>>()?,
            );
        }
        Ok(CoeffTable { rows })
    }

    /// Triangle from the closed form over scaled degenerate Stirling numbers.
    pub fn by_stirling_form(lambda: &Lambda<C>, n_max: usize) -> Self {
        let scaled = scaled_degenerate_stirling_table(lambda, n_max);
        let mut rows = vec![vec![C::one()]];
        for n in 1..=n_max {
            rows.push(
                (0..=n)
                    .map(|i| stirling_form_entry(lambda, &scaled, i, n))
                    .collect(),
            );
        }
        CoeffTable { rows }
    }
}

/// `i!(N+(i+1)λ-1)_{N-i} + i Σ_{l=0}^{N-i-1} (N+(i+1)λ-1)_l a_{i-1}(N-l-1)`.
fn unrolled_entry<C: Coeff>(
    lambda: &Lambda<C>,
    i: usize,
    n: usize,
    prior: impl Fn(usize, usize) -> C,
) -> C {
    let base = C::from_int(n as i64 - 1) + &lambda.value().scale(&rat(i as i64 + 1));
    let mut acc = falling_factorial(&base, n - i).scale(&factorial_rat(i));
    let mut sum = C::zero();
    for l in 0..n - i {
        sum += &(falling_factorial(&base, l) * &prior(i - 1, n - l - 1));
    }
    acc += &sum.scale(&rat(i as i64));
    acc
}

/// `a_{i,λ}(N)` from the unrolled recurrence, for `1 ≤ i ≤ N-1`.
///
/// The `a_{i-1}` values it needs come from the same unrolled formula, bottoming
/// out in `a_0(M) = (M+λ-1)_M` and `a_M(M) = M!`.
pub fn a_alternate_recurrence<C: Coeff>(lambda: &Lambda<C>, i: usize, big_n: usize) -> Result<C> {
    if i == 0 || i + 1 > big_n {
        return Err(Error::OutOfRange(format!(
            "unrolled recurrence needs 1 <= i <= N-1, got i={i}, N={big_n}"
        )));
    }
    let table = CoeffTable::by_unrolled_recurrence(lambda, big_n);
    Ok(table.get(i, big_n).clone())
}

/// `(-1)^N λ^{-i} Σ_{k=i}^{N} Σ_{l=0}^{k} (-1)^l C(k,i) C(k,l) (λl)_N`.
///
/// The double sum is assembled first and then divided by `λ^i`; in ℚ[λ] that
/// division is a coefficient shift that must leave no remainder.
pub fn a_explicit_falling<C: Coeff>(lambda: &Lambda<C>, i: usize, big_n: usize) -> Result<C> {
    if i > big_n {
        return Err(Error::OutOfRange(format!(
            "need i <= N, got i={i}, N={big_n}"
        )));
    }
    let falls: Vec<C> = (0..=big_n)
        .map(|l| falling_factorial(&lambda.value().scale(&rat(l as i64)), big_n))
        .collect();
    let mut acc = C::zero();
    for k in i..=big_n {
        let mut inner = C::zero();
        for (l, f) in falls.iter().enumerate().take(k + 1) {
            let term = f.scale(&binomial(k, l as i64));
            if l % 2 == 0 {
                inner += &term;
            } else {
                inner -= &term;
            }
        }
        acc += &inner.scale(&binomial(k, i as i64));
    }
    if big_n % 2 == 1 {
        acc = -acc;
    }
    lambda.div_pow(&acc, i)
}

fn stirling_form_entry<C: Coeff>(
    lambda: &Lambda<C>,
    scaled: &StirlingTable<C>,
    i: usize,
    big_n: usize,
) -> C {
    let mut acc = C::zero();
    for k in i..=big_n {
        let weight = factorial_rat(k) * binomial(k, i as i64);
        let term = (lambda.pow(k - i) * &scaled.get(big_n, k)).scale(&weight);
        if k % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    if big_n % 2 == 1 {
        -acc
    } else {
        acc
    }
}

/// `(-1)^N Σ_{k=i}^{N} (-1)^k k! C(k,i) λ^{k-i} · λ^{N-k} S_{2,1/λ}(N,k)`.
pub fn a_explicit_stirling<C: Coeff>(lambda: &Lambda<C>, i: usize, big_n: usize) -> Result<C> {
    if i > big_n {
        return Err(Error::OutOfRange(format!(
            "need i <= N, got i={i}, N={big_n}"
        )));
    }
    let scaled = scaled_degenerate_stirling_table(lambda, big_n);
    Ok(stirling_form_entry(lambda, &scaled, i, big_n))
}

/// `lim_{λ→0} a_{i,λ}(N) = (-1)^{N+i} i! s(N,i)`.
pub fn a_limit_at_zero(i: usize, big_n: usize) -> Result<Rational> {
    if i > big_n {
        return Err(Error::OutOfRange(format!(
            "need i <= N, got i={i}, N={big_n}"
        )));
    }
    let s1: StirlingTable<Rational> = stirling1_signed(big_n);
    a_limit_from_table(&s1, i, big_n)
}

pub(crate) fn a_limit_from_table(
    s1: &StirlingTable<Rational>,
    i: usize,
    big_n: usize,
) -> Result<Rational> {
    let v = s1.get(big_n, i) * factorial_rat(i);
    Ok(if (big_n + i) % 2 == 1 { -v } else { v })
}

/// The left side of the convolution identity linking rows `n` and `n-1`:
/// `Σ_{i=1}^{j} (1)_{j-i,λ}/(j-i)! (a_{n-i}(n) - n a_{n-i}(n-1))`,
/// and its right side `a_{n-j}(n) - n! (1)_{j,λ}/j!`.
pub fn convolution_sides<C: Coeff>(
    lambda: &Lambda<C>,
    table: &CoeffTable<C>,
    n: usize,
    j: usize,
) -> Result<(C, C)> {
    if j == 0 || j > n || n > table.n_max() {
        return Err(Error::OutOfRange(format!(
            "need 1 <= j <= n <= {}, got j={j}, n={n}",
            table.n_max()
        )));
    }
    let unit = |m: usize| {
        crate::combinatorics::generalized_falling(lambda, &C::one(), m)
            .scale(&factorial_rat(m).recip())
    };
    // a_{n-i}(n-1) vanishes above the diagonal (i = 0 never occurs here).
    let prev = |idx: usize| table.row(n - 1).get(idx).cloned().unwrap_or_else(C::zero);
    let mut lhs = C::zero();
    for i in 1..=j {
        let diff = table.get(n - i, n).clone() - prev(n - i).scale(&rat(n as i64));
        lhs += &(unit(j - i) * &diff);
    }
    let rhs = table.get(n - j, n).clone() - unit(j).scale(&factorial_rat(n));
    Ok((lhs, rhs))
}

/// Degree of every entry is at most `N - i`; returns the first violation.
pub fn degree_violation(table: &CoeffTable<crate::arith::LambdaPoly>) -> Option<(usize, usize)> {
    for (n, row) in table.rows().iter().enumerate() {
        for (i, p) in row.iter().enumerate() {
            if !p.is_zero() && p.degree().unwrap_or(0) > n - i {
                return Some((i, n));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::LambdaPoly;

    fn sym() -> Lambda<LambdaPoly> {
        Lambda::symbolic()
    }

    fn lp(c: &[i64]) -> LambdaPoly {
        LambdaPoly::from_ints(c)
    }

    #[test]
    fn recurrence_rows() {
        let t = CoeffTable::by_recurrence(&sym(), 3);
        assert_eq!(t.row(0), &[lp(&[1])]);
        assert_eq!(t.row(1), &[lp(&[0, 1]), lp(&[1])]);
        assert_eq!(t.row(2), &[lp(&[0, 1, 1]), lp(&[1, 3]), lp(&[2])]);
        assert_eq!(
            t.row(3),
            &[lp(&[0, 2, 3, 1]), lp(&[2, 9, 7]), lp(&[6, 12]), lp(&[6])]
        );
    }

    #[test]
    fn falling_form_examples() {
        assert_eq!(a_explicit_falling(&sym(), 1, 1).unwrap(), lp(&[1]));
        assert_eq!(a_explicit_falling(&sym(), 1, 2).unwrap(), lp(&[1, 3]));
        assert_eq!(a_explicit_falling(&sym(), 0, 3).unwrap(), lp(&[0, 2, 3, 1]));
        assert!(a_explicit_falling(&sym(), 4, 3).is_err());
        assert_eq!(
            a_explicit_falling(&Lambda::at(rat(0)), 1, 2),
            Err(Error::LambdaZero)
        );
    }

    #[test]
    fn stirling_form_examples() {
        for n in 1..=6 {
            assert_eq!(
                a_explicit_stirling(&sym(), n, n).unwrap(),
                LambdaPoly::constant(factorial_rat(n))
            );
        }
        assert_eq!(a_explicit_stirling(&sym(), 0, 2).unwrap(), lp(&[0, 1, 1]));
        assert_eq!(a_explicit_stirling(&sym(), 2, 3).unwrap(), lp(&[6, 12]));
    }

    #[test]
    fn alternate_recurrence_examples() {
        assert_eq!(a_alternate_recurrence(&sym(), 1, 2).unwrap(), lp(&[1, 3]));
        assert_eq!(
            a_alternate_recurrence(&sym(), 1, 3).unwrap(),
            lp(&[2, 9, 7])
        );
        assert_eq!(a_alternate_recurrence(&sym(), 2, 3).unwrap(), lp(&[6, 12]));
        assert!(a_alternate_recurrence(&sym(), 0, 3).is_err());
        assert!(a_alternate_recurrence(&sym(), 3, 3).is_err());
    }

    #[test]
    fn limit_examples() {
        assert_eq!(a_limit_at_zero(1, 3).unwrap(), rat(2));
        for n in 1..=6 {
            assert_eq!(a_limit_at_zero(n, n).unwrap(), factorial_rat(n));
            assert_eq!(a_limit_at_zero(0, n).unwrap(), rat(0));
        }
    }

    #[test]
    fn four_routes_agree_small() {
        let lam = sym();
        let rec = CoeffTable::by_recurrence(&lam, 7);
        assert_eq!(CoeffTable::by_unrolled_recurrence(&lam, 7), rec);
        assert_eq!(CoeffTable::by_falling_form(&lam, 7).unwrap(), rec);
        assert_eq!(CoeffTable::by_stirling_form(&lam, 7), rec);
        assert_eq!(degree_violation(&rec), None);
    }

    #[test]
    fn evaluated_domain_matches_specialization() {
        let sym_table = CoeffTable::by_recurrence(&sym(), 6);
        let x = crate::arith::ratio(-1, 3);
        let rat_table = CoeffTable::by_recurrence(&Lambda::at(x.clone()), 6);
        for n in 0..=6 {
            for i in 0..=n {
                assert_eq!(&sym_table.get(i, n).eval(&x), rat_table.get(i, n));
            }
        }
        assert_eq!(
            CoeffTable::by_falling_form(&Lambda::at(x.clone()), 6).unwrap(),
            rat_table
        );
    }

    #[test]
    fn convolution_identity_small() {
        let lam = sym();
        let t = CoeffTable::by_recurrence(&lam, 6);
        for n in 1..=6 {
            for j in 1..=n {
                let (l, r) = convolution_sides(&lam, &t, n, j).unwrap();
                assert_eq!(l, r, "n={n} j={j}");
            }
        }
        assert!(convolution_sides(&lam, &t, 3, 0).is_err());
        assert!(convolution_sides(&lam, &t, 7, 1).is_err());
    }
}
