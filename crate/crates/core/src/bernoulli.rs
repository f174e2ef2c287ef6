//! Degenerate Bernoulli numbers of the second kind,
//!
//! ```text
//! λt / ((1+t)^λ - 1) = Σ b_{n,λ} t^n/n!,
//! ```
//!
//! by four independent routes, their higher-order versions, and the classical
//! numbers reached as λ → 0.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, Coeff, Lambda, LambdaPoly, Rational, Scalar};
use crate::coeff_a::CoeffTable;
use crate::combinatorics::{
    binomial, factorial, factorial_rat, falling_factorial, generalized_falling, multinomial,
    scaled_degenerate_stirling_table, stirling1_signed, StirlingTable,
};
use crate::error::{Error, Result};
use crate::series::log_lambda_quotient_series;

/// Hard cap for the composition enumeration, which visits `2^{n-1}` terms.
pub const MULTINOMIAL_MAX_N: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Series,
    Recurrence,
    Multinomial,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplicitForm {
    /// In terms of the ODE coefficients `a_{i,λ}(n)` and `a_{i,λ}(n-1)`.
    AForm,
    /// In terms of scaled degenerate Stirling numbers.
    StirlingForm,
    /// In terms of falling factorials `(λl)_n` and `(λl+1)_n`.
    FallingForm,
}

impl ExplicitForm {
    pub const ALL: [ExplicitForm; 3] = [
        ExplicitForm::AForm,
        ExplicitForm::StirlingForm,
        ExplicitForm::FallingForm,
    ];
}

/// `b^{(r)}_{n,λ}` for `n = 0..values.len()`, tagged with the route that made it.
#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliRow<C> {
    pub order: usize,
    pub values: Vec<C>,
    pub provenance: Route,
}

impl<C: Coeff> BernoulliRow<C> {
    pub fn get(&self, n: usize) -> &C {
        &self.values[n]
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }
}

fn ensure_nonzero<C: Coeff>(lambda: &Lambda<C>) -> Result<()> {
    if lambda.is_zero() {
        Err(Error::LambdaZero)
    } else {
        Ok(())
    }
}

/// `n!` times the coefficients of the reciprocal of `((1+t)^λ-1)/(λt)`.
pub fn b_via_series<C: Coeff>(lambda: &Lambda<C>, n_max: usize) -> Result<BernoulliRow<C>> {
    let mut row = b_higher_order(lambda, 1, n_max)?;
    row.provenance = Route::Series;
    Ok(row)
}

/// `b_0 = 1`, `b_n = -Σ_{l<n} C(n,l) (λ-1)_{n-l}/(n-l+1) b_l`.
pub fn b_via_recurrence<C: Coeff>(lambda: &Lambda<C>, n_max: usize) -> Result<BernoulliRow<C>> {
    ensure_nonzero(lambda)?;
    let lm1 = lambda.value().clone() - C::one();
    let weights: Vec<C> = (0..=n_max)
        .map(|m| falling_factorial(&lm1, m).scale(&Rational::new(1.into(), (m as i64 + 1).into())))
        .collect();
    let mut values: Vec<C> = Vec::with_capacity(n_max + 1);
    values.push(C::one());
    for n in 1..=n_max {
        let mut acc = C::zero();
        for (l, b) in values.iter().enumerate() {
            acc += &(weights[n - l].clone() * b).scale(&binomial(n, l as i64));
        }
        values.push(-acc);
    }
    Ok(BernoulliRow {
        order: 1,
        values,
        provenance: Route::Recurrence,
    })
}

/// Direct enumeration over all compositions `m_1+…+m_k = n`, `m_i ≥ 1`:
///
/// ```text
/// b_n = Σ_k (-1)^k Σ C(n; m_1,…,m_k) Π (λ-1)_{m_i}/(m_i+1).
/// ```
///
/// Compositions are walked depth-first, sharing the running product between
/// compositions with a common prefix. With `λ = p/q` (`q = 1` for symbolic
/// λ), each factor is written `u_m / (q^m (m_i+1)!)` with `u_m = q^m (λ-1)_m`
/// integral, and the walk starts from `(2n)!`. Since `Σ (m_i+1) ≤ 2n`, every
/// prefix stays an integer polynomial and the divisions are exact.
pub fn b_via_multinomial<C: Coeff>(lambda: &Lambda<C>, n: usize) -> Result<C> {
    ensure_nonzero(lambda)?;
    if n > MULTINOMIAL_MAX_N {
        return Err(Error::OutOfRange(format!(
            "multinomial route is capped at n = {MULTINOMIAL_MAX_N}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(C::one());
    }
    let q = match lambda.value().to_scalar() {
        Scalar::Rational(r) => Rational::from_integer(r.denom().clone()),
        Scalar::Poly(_) => Rational::one(),
    };
    let lm1 = lambda.value().clone() - C::one();
    let mut u: Vec<IntPoly> = Vec::with_capacity(n + 1);
    let mut q_pow = Rational::one();
    for m in 0..=n {
        let v = falling_factorial(&lm1, m).scale(&q_pow);
        u.push(int_lift(&v).ok_or_else(|| Error::Internal("non-integral factor".into()))?);
        q_pow *= &q;
    }
    let block: Vec<BigInt> = (0..=n).map(|m| factorial(m + 1)).collect();

    fn walk(
        remaining: usize,
        parts: usize,
        prefix: &IntPoly,
        u: &[IntPoly],
        block: &[BigInt],
        acc: &mut IntPoly,
    ) {
        if remaining == 0 {
            int_add_signed(acc, prefix, parts % 2 == 1);
            return;
        }
        for m in 1..=remaining {
            if u[m].is_empty() {
                continue;
            }
            let divided: IntPoly = prefix.iter().map(|c| c / &block[m]).collect();
            walk(
                remaining - m,
                parts + 1,
                &int_mul(&divided, &u[m]),
                u,
                block,
                acc,
            );
        }
    }

    let mut acc = IntPoly::new();
    walk(n, 0, &vec![factorial(2 * n)], &u, &block, &mut acc);
    let scale = factorial_rat(n) / (factorial_rat(2 * n) * Coeff::pow(&q, n));
    let mut out = C::zero();
    for (i, c) in acc.iter().enumerate() {
        if !c.is_zero() {
            out += &(lambda.pow(i).scale(&Rational::from_integer(c.clone())));
        }
    }
    Ok(out.scale(&scale))
}

/// Integer polynomial in λ, lowest degree first.
type IntPoly = Vec<BigInt>;

fn int_lift<C: Coeff>(c: &C) -> Option<IntPoly> {
    let coeffs: Vec<Rational> = match c.to_scalar() {
        Scalar::Rational(r) => vec![r],
        Scalar::Poly(p) => p.coeffs().to_vec(),
    };
    coeffs
        .into_iter()
        .map(|r| r.is_integer().then(|| r.to_integer()))
        .collect()
}

fn int_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return IntPoly::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn int_add_signed(acc: &mut IntPoly, x: &IntPoly, negate: bool) {
    if acc.len() < x.len() {
        acc.resize(x.len(), BigInt::zero());
    }
    for (a, b) in acc.iter_mut().zip(x) {
        if negate {
            *a -= b;
        } else {
            *a += b;
        }
    }
}

/// Visits every composition of `n` into positive parts, grouped by the number
/// of parts and lexicographic within a group.
pub fn for_each_composition(n: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(
        remaining: usize,
        slots: usize,
        parts: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if slots == 0 {
            if remaining == 0 {
                visit(parts);
            }
            return;
        }
        for m in 1..=remaining.saturating_sub(slots - 1) {
            parts.push(m);
            rec(remaining - m, slots - 1, parts, visit);
            parts.pop();
        }
    }
    if n == 0 {
        visit(&[]);
        return;
    }
    let mut parts = Vec::with_capacity(n);
    for k in 1..=n {
        rec(n, k, &mut parts, &mut visit);
    }
}

/// Plain composition-by-composition evaluation with explicit multinomial
/// coefficients; exponential in `n`, kept for cross-checking the walk above.
pub fn b_via_multinomial_naive<C: Coeff>(lambda: &Lambda<C>, n: usize) -> Result<C> {
    ensure_nonzero(lambda)?;
    let lm1 = lambda.value().clone() - C::one();
    let v: Vec<C> = (0..=n)
        .map(|m| falling_factorial(&lm1, m).scale(&rat(m as i64 + 1).recip()))
        .collect();
    let mut acc = C::zero();
    let mut failure = None;
    for_each_composition(n, |parts| {
        let coef = match multinomial(n, parts) {
            Ok(c) => c,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let term = parts.iter().fold(C::one(), |p, &m| p * &v[m]).scale(&coef);
        if parts.len() % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

/// Inputs shared by the three closed forms at index `n`.
struct ExplicitContext<C> {
    a: CoeffTable<C>,
    scaled: StirlingTable<C>,
}

impl<C: Coeff> ExplicitContext<C> {
    fn new(lambda: &Lambda<C>, n_max: usize) -> Self {
        ExplicitContext {
            a: CoeffTable::by_recurrence(lambda, n_max),
            scaled: scaled_degenerate_stirling_table(lambda, n_max),
        }
    }

    fn eval(&self, lambda: &Lambda<C>, n: usize, form: ExplicitForm) -> Result<C> {
        if n == 0 {
            return Err(Error::OutOfRange("closed forms need n >= 1".into()));
        }
        let one = C::one();
        let unit = |m: usize| generalized_falling(lambda, &one, m);
        let n_rat = rat(n as i64);
        let lead = unit(n + 1).scale(&rat(n as i64 + 1).recip());
        let sign_n = |x: C| if n % 2 == 1 { -x } else { x };

        match form {
            ExplicitForm::AForm => {
                let mut acc = lead;
                for i in 0..n {
                    let diff = self.a.get(i, n).clone() - self.a.get(i, n - 1).scale(&n_rat);
                    acc += &(unit(i + 1).scale(&factorial_rat(i + 1).recip()) * &diff);
                }
                Ok(sign_n(acc))
            }
            ExplicitForm::StirlingForm => {
                let mut acc = sign_n(lead);
                for i in 0..n {
                    let w = unit(i + 1).scale(&factorial_rat(i + 1).recip());
                    for k in i..=n {
                        // λ^{n-i-1}(λ S(n,k) + n S(n-1,k)) with S = S_{2,1/λ},
                        // regrouped as λ^{k-i}(scaled(n,k) + n·scaled(n-1,k));
                        // scaled(n-1,n) = 0.
                        let mut inner = self.scaled.get(n, k);
                        if k < n {
                            inner += &self.scaled.get(n - 1, k).scale(&n_rat);
                        }
                        let weight = factorial_rat(k) * binomial(k, i as i64);
                        let term = (w.clone() * &lambda.pow(k - i) * &inner).scale(&weight);
                        if k % 2 == 0 {
                            acc += &term;
                        } else {
                            acc -= &term;
                        }
                    }
                }
                Ok(acc)
            }
            ExplicitForm::FallingForm => {
                let mut acc = sign_n(lead);
                let lam = lambda.value();
                let fall_n: Vec<C> = (0..=n)
                    .map(|l| falling_factorial(&lam.scale(&rat(l as i64)), n))
                    .collect();
                let fall_n_shift: Vec<C> = (0..=n)
                    .map(|l| falling_factorial(&(lam.scale(&rat(l as i64)) + &one), n))
                    .collect();
                let alt_sum = |k: usize, f: &[C]| {
                    let mut s = C::zero();
                    for (l, v) in f.iter().enumerate().take(k + 1) {
                        let t = v.scale(&binomial(k, l as i64));
                        if l % 2 == 0 {
                            s += &t;
                        } else {
                            s -= &t;
                        }
                    }
                    s
                };
                let top = alt_sum(n, &fall_n);
                let lower: Vec<C> = (0..n).map(|k| alt_sum(k, &fall_n_shift)).collect();
                for i in 0..n {
                    let mut braces = top.scale(&binomial(n, i as i64));
                    for (k, s) in lower.iter().enumerate().skip(i) {
                        braces += &s.scale(&binomial(k, i as i64));
                    }
                    let quotient = lambda.div_pow(&braces, i)?;
                    let w = unit(i + 1).scale(&factorial_rat(i + 1).recip());
                    acc += &(w * &quotient);
                }
                Ok(acc)
            }
        }
    }
}

/// `b_{n,λ}` from one of the three closed forms; requires `n ≥ 1`.
pub fn b_via_explicit<C: Coeff>(lambda: &Lambda<C>, n: usize, form: ExplicitForm) -> Result<C> {
    ensure_nonzero(lambda)?;
    ExplicitContext::new(lambda, n).eval(lambda, n, form)
}

/// Row `b_0..b_{n_max}` from a closed form, with `b_0 = 1`.
pub fn b_explicit_row<C: Coeff>(
    lambda: &Lambda<C>,
    n_max: usize,
    form: ExplicitForm,
) -> Result<BernoulliRow<C>> {
    ensure_nonzero(lambda)?;
    let ctx = ExplicitContext::new(lambda, n_max);
    let mut values = vec![C::one()];
    for n in 1..=n_max {
        values.push(ctx.eval(lambda, n, form)?);
    }
    Ok(BernoulliRow {
        order: 1,
        values,
        provenance: Route::Explicit,
    })
}

pub fn b_multinomial_row<C: Coeff>(lambda: &Lambda<C>, n_max: usize) -> Result<BernoulliRow<C>> {
    let values = (0..=n_max)
        .map(|n| b_via_multinomial(lambda, n))
        .collect::<Result<_>>()?;
    Ok(BernoulliRow {
        order: 1,
        values,
        provenance: Route::Multinomial,
    })
}

/// `b^{(r)}_{n,λ}`: `n!` times the coefficients of `(λt/((1+t)^λ-1))^r`.
pub fn b_higher_order<C: Coeff>(
    lambda: &Lambda<C>,
    r: usize,
    n_max: usize,
) -> Result<BernoulliRow<C>> {
    if r == 0 {
        return Err(Error::OutOfRange("order r must be at least 1".into()));
    }
    ensure_nonzero(lambda)?;
    let base = log_lambda_quotient_series(lambda, n_max + 1).reciprocal()?;
    let powered = base.pow(r);
    let values = powered
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c.scale(&factorial_rat(n)))
        .collect();
    Ok(BernoulliRow {
        order: r,
        values,
        provenance: Route::Series,
    })
}

/// Rows `b^{(1)}, …, b^{(r_max)}`, each through index `n_max`, sharing one
/// series inversion.
pub fn b_higher_order_rows<C: Coeff>(
    lambda: &Lambda<C>,
    r_max: usize,
    n_max: usize,
) -> Result<Vec<BernoulliRow<C>>> {
    ensure_nonzero(lambda)?;
    let base = log_lambda_quotient_series(lambda, n_max + 1).reciprocal()?;
    let mut power = crate::series::TruncatedSeries::one(n_max + 1);
    let mut rows = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        power = &power * &base;
        rows.push(BernoulliRow {
            order: r,
            values: power
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, c)| c.scale(&factorial_rat(n)))
                .collect(),
            provenance: Route::Series,
        });
    }
    Ok(rows)
}

/// Classical `b_n` as the λ = 0 value of the symbolic series row.
pub fn classical_b_by_limit(n_max: usize) -> Vec<Rational> {
    let row =
        b_via_series(&Lambda::<LambdaPoly>::symbolic(), n_max).expect("symbolic lambda is nonzero");
    let zero = Rational::zero();
    row.values.iter().map(|p| p.eval(&zero)).collect()
}

/// Classical `b_n = Σ_{i=0}^{n} (-1)^i/(i+1) (s(n,i) + n s(n-1,i))`, with
/// `s(n-1,n) = 0` and `b_0 = 1`.
pub fn classical_b_by_stirling(n_max: usize) -> Vec<Rational> {
    let s1: StirlingTable<Rational> = stirling1_signed(n_max);
    let mut out = vec![Rational::one()];
    for n in 1..=n_max {
        let mut acc = Rational::zero();
        for i in 0..=n {
            let inner = s1.get(n, i) + s1.get(n - 1, i) * rat(n as i64);
            let term = inner / rat(i as i64 + 1);
            if i % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn sym() -> Lambda<LambdaPoly> {
        Lambda::symbolic()
    }

    fn b1() -> LambdaPoly {
        LambdaPoly::new(vec![ratio(1, 2), ratio(-1, 2)])
    }

    fn b2() -> LambdaPoly {
        LambdaPoly::new(vec![ratio(-1, 6), rat(0), ratio(1, 6)])
    }

    #[test]
    fn series_examples() {
        let row = b_via_series(&sym(), 2).unwrap();
        assert_eq!(row.values, vec![LambdaPoly::one(), b1(), b2()]);
        assert_eq!(row.provenance, Route::Series);
    }

    #[test]
    fn recurrence_examples() {
        let row = b_via_recurrence(&sym(), 2).unwrap();
        assert_eq!(row.values, vec![LambdaPoly::one(), b1(), b2()]);
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(b_via_multinomial(&sym(), 0).unwrap(), LambdaPoly::one());
        assert_eq!(b_via_multinomial(&sym(), 1).unwrap(), b1());
        assert_eq!(b_via_multinomial(&sym(), 2).unwrap(), b2());
        assert!(b_via_multinomial(&sym(), 25).is_err());
        for n in 0..=8 {
            assert_eq!(
                b_via_multinomial(&sym(), n).unwrap(),
                b_via_multinomial_naive(&sym(), n).unwrap()
            );
        }
    }

    #[test]
    fn compositions_grouped_by_length() {
        let mut seen = Vec::new();
        for_each_composition(3, |p| seen.push(p.to_vec()));
        assert_eq!(seen, vec![vec![3], vec![1, 2], vec![2, 1], vec![1, 1, 1]]);
        let mut count = 0;
        for_each_composition(10, |_| count += 1);
        assert_eq!(count, 1 << 9);
    }

    #[test]
    fn explicit_examples() {
        for form in ExplicitForm::ALL {
            assert_eq!(b_via_explicit(&sym(), 1, form).unwrap(), b1(), "{form:?}");
            assert_eq!(b_via_explicit(&sym(), 2, form).unwrap(), b2(), "{form:?}");
        }
        assert!(b_via_explicit(&sym(), 0, ExplicitForm::AForm).is_err());
    }

    #[test]
    fn higher_order_examples() {
        let r1 = b_higher_order(&sym(), 1, 6).unwrap();
        assert_eq!(r1.values, b_via_series(&sym(), 6).unwrap().values);
        let r2 = b_higher_order(&sym(), 2, 3).unwrap();
        assert_eq!(r2.get(0), &LambdaPoly::one());
        assert_eq!(r2.get(1), &LambdaPoly::from_ints(&[1, -1]));
        let rows = b_higher_order_rows(&sym(), 3, 5).unwrap();
        for (idx, row) in rows.iter().enumerate() {
            assert_eq!(row, &b_higher_order(&sym(), idx + 1, 5).unwrap());
        }
    }

    #[test]
    fn zero_lambda_is_rejected() {
        let zero = Lambda::at(rat(0));
        assert_eq!(b_via_series(&zero, 3), Err(Error::LambdaZero));
        assert_eq!(b_via_recurrence(&zero, 3), Err(Error::LambdaZero));
        assert_eq!(b_via_multinomial(&zero, 3), Err(Error::LambdaZero));
        assert_eq!(
            b_via_explicit(&zero, 3, ExplicitForm::AForm),
            Err(Error::LambdaZero)
        );
    }

    #[test]
    fn classical_examples() {
        let lim = classical_b_by_limit(3);
        assert_eq!(lim, vec![rat(1), ratio(1, 2), ratio(-1, 6), ratio(1, 4)]);
        assert_eq!(classical_b_by_stirling(3), lim);
    }
}
