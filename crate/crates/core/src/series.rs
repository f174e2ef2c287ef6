//! Truncated formal power series and Laurent series over a [`Coeff`] ring.
//!
//! A [`TruncatedSeries`] of order `M` knows its coefficients of `t^0..t^{M-1}`
//! exactly and nothing beyond. Every operation returns the largest order its
//! inputs justify, never more.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{rat, ratio, Coeff, Lambda, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> TruncatedSeries<C> {
    /// Series whose order is the number of supplied coefficients.
    pub fn new(coeffs: Vec<C>) -> Self {
        TruncatedSeries { coeffs }
    }

    /// An exact polynomial, padded with zeros (or cut) to `order` coefficients.
    pub fn from_poly(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order, C::zero());
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_poly(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::from_poly(vec![C::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `t^n`, or `None` past the truncation order.
    pub fn get(&self, n: usize) -> Option<&C> {
        self.coeffs.get(n)
    }

    /// Coefficient of `t^n`. Panics past the truncation order.
    pub fn coeff(&self, n: usize) -> &C {
        assert!(
            n < self.order(),
            "coefficient of t^{n} requested from a series known to O(t^{})",
            self.order()
        );
        &self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().take(order).cloned().collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.scale(r)).collect(),
        }
    }

    /// Multiplies by `t^k`; the order grows by `k` since the new low
    /// coefficients are known to vanish.
    pub fn mul_t_pow(&self, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncatedSeries { coeffs }
    }

    /// Divides by `t^k`, dropping the lowest `k` coefficients; they must vanish.
    pub fn div_t_pow(&self, k: usize) -> Option<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return None;
        }
        Some(TruncatedSeries {
            coeffs: self.coeffs.iter().skip(k).cloned().collect(),
        })
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn reciprocal(&self) -> Result<Self> {
        let order = self.order();
        if order == 0 {
            return Ok(Self::zero(0));
        }
        let inv0 = self.coeffs[0].unit_inverse().ok_or(Error::NotInvertible)?;
        let mut out: Vec<C> = Vec::with_capacity(order);
        out.push(inv0.clone());
        for n in 1..order {
            let mut acc = C::zero();
            for i in 1..=n {
                let a = &self.coeffs[i];
                if !a.is_zero() {
                    acc += &a.mul_ref(&out[n - i]);
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// `self^k` by binary exponentiation.
    pub fn pow(&self, k: usize) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Term-wise derivative; the result is known to one order less.
    pub fn derivative(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::InsufficientOrder { need: 1, have: 0 });
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c.scale(&rat(n as i64)))
            .collect();
        Ok(TruncatedSeries { coeffs })
    }
}

impl<C: Coeff> Add for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn add(self, rhs: &TruncatedSeries<C>) -> TruncatedSeries<C> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.clone() + b)
            .collect();
        TruncatedSeries { coeffs }
    }
}

impl<C: Coeff> Sub for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn sub(self, rhs: &TruncatedSeries<C>) -> TruncatedSeries<C> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.clone() - b)
            .collect();
        TruncatedSeries { coeffs }
    }
}

impl<C: Coeff> Neg for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn neg(self) -> TruncatedSeries<C> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<C: Coeff> Mul for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn mul(self, rhs: &TruncatedSeries<C>) -> TruncatedSeries<C> {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![C::zero(); order];
        for (i, a) in self.coeffs.iter().take(order).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += &a.mul_ref(b);
                }
            }
        }
        TruncatedSeries { coeffs }
    }
}

/// `t^{-pole} · body`.
///
/// Kept canonical: either the pole is zero or the body has a nonzero
/// constant term (or the body is exhausted). Coefficients are exact for all
/// exponents below [`LaurentSeries::precision`].
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<C> {
    pole: usize,
    body: TruncatedSeries<C>,
}

impl<C: Coeff> LaurentSeries<C> {
    pub fn new(pole: usize, body: TruncatedSeries<C>) -> Self {
        let lead = body
            .coeffs
            .iter()
            .take(pole)
            .take_while(|c| c.is_zero())
            .count();
        if lead == 0 {
            return LaurentSeries { pole, body };
        }
        LaurentSeries {
            pole: pole - lead,
            body: TruncatedSeries {
                coeffs: body.coeffs[lead..].to_vec(),
            },
        }
    }

    pub fn from_series(body: TruncatedSeries<C>) -> Self {
        LaurentSeries { pole: 0, body }
    }

    pub fn pole(&self) -> usize {
        self.pole
    }

    pub fn body(&self) -> &TruncatedSeries<C> {
        &self.body
    }

    /// Exponents strictly below this value are known exactly.
    pub fn precision(&self) -> i64 {
        self.body.order() as i64 - self.pole as i64
    }

    /// Coefficient of `t^e`; zero below the pole, `None` past the precision.
    pub fn coeff(&self, e: i64) -> Option<C> {
        if e >= self.precision() {
            return None;
        }
        let idx = e + self.pole as i64;
        if idx < 0 {
            return Some(C::zero());
        }
        Some(self.body.coeffs[idx as usize].clone())
    }

    /// Drops every coefficient at exponent `precision` and above.
    pub fn truncate_precision(&self, precision: i64) -> Self {
        let keep = (precision + self.pole as i64).max(0) as usize;
        LaurentSeries {
            pole: self.pole,
            body: self.body.truncate(keep),
        }
    }

    /// Back to an ordinary power series, if there is no pole.
    pub fn to_series(&self) -> Option<TruncatedSeries<C>> {
        (self.pole == 0).then(|| self.body.clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.pole, self.body.scale(c))
    }

    pub fn mul_series(&self, s: &TruncatedSeries<C>) -> Self {
        Self::new(self.pole, &self.body * s)
    }

    pub fn pow(&self, k: usize) -> Self {
        Self::new(self.pole * k, self.body.pow(k))
    }

    /// `d/dt (t^{-p} G) = t^{-(p+1)} (t G' - p G)`.
    pub fn derivative(&self) -> Result<Self> {
        if self.body.order() == 0 {
            return Err(Error::InsufficientOrder { need: 1, have: 0 });
        }
        let p = self.pole as i64;
        let coeffs = self
            .body
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.scale(&rat(n as i64 - p)))
            .collect();
        Ok(Self::new(self.pole + 1, TruncatedSeries { coeffs }))
    }

    /// Re-expresses with a larger pole by padding the body with leading zeros.
    fn with_pole(&self, pole: usize) -> TruncatedSeries<C> {
        debug_assert!(pole >= self.pole);
        self.body.mul_t_pow(pole - self.pole)
    }

    /// First exponent where the two series differ, with both coefficients,
    /// compared over the range where both are known.
    pub fn first_difference(&self, other: &Self) -> Option<(i64, C, C)> {
        let from = -(self.pole.max(other.pole) as i64);
        let to = self.precision().min(other.precision());
        (from..to).find_map(|e| {
            let a = self.coeff(e).expect("within precision");
            let b = other.coeff(e).expect("within precision");
            (a != b).then_some((e, a, b))
        })
    }
}

impl<C: Coeff> Add for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn add(self, rhs: &LaurentSeries<C>) -> LaurentSeries<C> {
        let pole = self.pole.max(rhs.pole);
        LaurentSeries::new(pole, &self.with_pole(pole) + &rhs.with_pole(pole))
    }
}

impl<C: Coeff> Sub for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn sub(self, rhs: &LaurentSeries<C>) -> LaurentSeries<C> {
        let pole = self.pole.max(rhs.pole);
        LaurentSeries::new(pole, &self.with_pole(pole) - &rhs.with_pole(pole))
    }
}

impl<C: Coeff> Neg for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn neg(self) -> LaurentSeries<C> {
        LaurentSeries {
            pole: self.pole,
            body: -&self.body,
        }
    }
}

impl<C: Coeff> Mul for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn mul(self, rhs: &LaurentSeries<C>) -> LaurentSeries<C> {
        LaurentSeries::new(self.pole + rhs.pole, &self.body * &rhs.body)
    }
}

/// `(1+t)^λ = Σ (λ)_n/n! t^n`.
pub fn binom_lambda_series<C: Coeff>(lambda: &Lambda<C>, order: usize) -> TruncatedSeries<C> {
    let mut coeffs = Vec::with_capacity(order);
    let mut c = C::one();
    for n in 0..order {
        if n > 0 {
            let factor = lambda.value().clone() - C::from_int(n as i64 - 1);
            c = (c * &factor).scale(&ratio(1, n as i64));
        }
        coeffs.push(c.clone());
    }
    TruncatedSeries::new(coeffs)
}

/// `e_λ(t) = (1+λt)^{1/λ} = Σ (1)_{n,λ}/n! t^n`.
pub fn degenerate_exp_series<C: Coeff>(lambda: &Lambda<C>, order: usize) -> TruncatedSeries<C> {
    let mut coeffs = Vec::with_capacity(order);
    let mut c = C::one();
    for n in 0..order {
        if n > 0 {
            let factor = C::one() - lambda.value().scale(&rat(n as i64 - 1));
            c = (c * &factor).scale(&ratio(1, n as i64));
        }
        coeffs.push(c.clone());
    }
    TruncatedSeries::new(coeffs)
}

/// `((1+t)^λ - 1)/(λt) = Σ (λ-1)_n/(n+1) · t^n/n!`, the degenerate logarithm
/// of `1+t` divided by `t`. Defined at every λ, including zero where it is
/// `log(1+t)/t`.
pub fn log_lambda_quotient_series<C: Coeff>(
    lambda: &Lambda<C>,
    order: usize,
) -> TruncatedSeries<C> {
    // c_n = (λ-1)_n / ((n+1)·n!), built from the running ratio (λ-1)_n/n!.
    let mut coeffs = Vec::with_capacity(order);
    let mut falling_over_fact = C::one();
    for n in 0..order {
        if n > 0 {
            let factor = lambda.value().clone() - C::from_int(n as i64);
            falling_over_fact = (falling_over_fact * &factor).scale(&ratio(1, n as i64));
        }
        coeffs.push(falling_over_fact.scale(&ratio(1, n as i64 + 1)));
    }
    TruncatedSeries::new(coeffs)
}

/// `F(t;λ) = 1/log_λ(1+t) = λ/((1+t)^λ - 1)` as `t^{-1}` times a body of the
/// given order. The body's `n`-th coefficient is `b_{n,λ}/n!`.
pub fn f_laurent<C: Coeff>(lambda: &Lambda<C>, order: usize) -> Result<LaurentSeries<C>> {
    if lambda.is_zero() {
        return Err(Error::LambdaZero);
    }
    let body = log_lambda_quotient_series(lambda, order).reciprocal()?;
    Ok(LaurentSeries::new(1, body))
}

/// `log(1+t)/t = Σ (-1)^m t^m/(m+1)`.
pub fn log1p_quotient_series(order: usize) -> TruncatedSeries<Rational> {
    let coeffs = (0..order)
        .map(|m| {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            ratio(sign, m as i64 + 1)
        })
        .collect();
    TruncatedSeries::new(coeffs)
}

/// `1/log(1+t)` as a Laurent series with a simple pole.
pub fn classical_f_laurent(order: usize) -> LaurentSeries<Rational> {
    let body = log1p_quotient_series(order)
        .reciprocal()
        .expect("constant term is one");
    LaurentSeries::new(1, body)
}

/// `(1+t)^n` as an exact polynomial of the given order.
pub fn one_plus_t_pow<C: Coeff>(n: usize, order: usize) -> TruncatedSeries<C> {
    let mut coeffs = vec![C::one()];
    for _ in 0..n {
        let mut next = vec![C::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c;
        }
        coeffs = next;
    }
    TruncatedSeries::from_poly(coeffs, order)
}

impl<C: Coeff> TruncatedSeries<C> {
    /// The constant series `c`.
    pub fn constant(c: C, order: usize) -> Self {
        Self::from_poly(vec![c], order)
    }
}

impl<C: Coeff> LaurentSeries<C> {
    pub fn zero(order: usize) -> Self {
        LaurentSeries::from_series(TruncatedSeries::zero(order))
    }

    pub fn is_one_at_leading(&self) -> bool {
        self.body.get(0).is_some_and(One::is_one)
    }
}
