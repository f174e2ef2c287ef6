//! Exact scalar arithmetic.
//!
//! Two coefficient domains exist: [`Rational`], used when λ has been fixed to a
//! rational value, and [`LambdaPoly`], the ring ℚ[λ] used when λ stays
//! symbolic. Every algorithm in the crate is generic over [`Coeff`], and the
//! value of λ travels alongside as a [`Lambda`] so that a single computation
//! can never mix the two domains.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical reduced form.
pub type Rational = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den` as a reduced rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `[-]digits` or `[-]digits/digits`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    fn digits(part: &str) -> Option<BigInt> {
        if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        part.parse().ok()
    }

    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (digits(n), digits(d)),
        None => (digits(body), Some(BigInt::one())),
    };
    let (Some(mut num), Some(den)) = (num, den) else {
        return Err(Error::Parse(s.to_string()));
    };
    if den.is_zero() {
        return Err(Error::ZeroDenominator(s.to_string()));
    }
    if negative {
        num = -num;
    }
    Ok(Rational::new(num, den))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Polynomial in λ with rational coefficients, lowest degree first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LambdaPoly {
    coeffs: Vec<Rational>,
}

impl LambdaPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        LambdaPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate λ itself.
    pub fn lambda() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of λ^i, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Substitutes λ := x (Horner).
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Divides by λ^i, provided the lowest `i` coefficients vanish.
    pub fn shift_down(&self, i: usize) -> Option<Self> {
        if self.coeffs.iter().take(i).any(|c| !c.is_zero()) {
            return None;
        }
        Some(LambdaPoly {
            coeffs: self.coeffs.iter().skip(i).cloned().collect(),
        })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        LambdaPoly {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Renders with explicit signs in ascending powers, e.g. `2+9λ+7λ^2`.
    pub fn to_plain_string(&self) -> String {
        render_terms(
            &self.coeffs,
            |k| match k {
                1 => "λ".to_string(),
                _ => format!("λ^{k}"),
            },
            plain_coeff,
        )
    }

    /// LaTeX rendering in ascending powers, e.g. `2+9\lambda+7\lambda^{2}`.
    pub fn to_latex(&self) -> String {
        render_terms(
            &self.coeffs,
            |k| match k {
                1 => "\\lambda".to_string(),
                _ => format!("\\lambda^{{{k}}}"),
            },
            latex_coeff,
        )
    }
}

/// Renders a coefficient list; `coeff_fmt(c, has_power)` must include the sign.
fn render_terms(
    coeffs: &[Rational],
    power: impl Fn(usize) -> String,
    coeff_fmt: impl Fn(&Rational, bool) -> String,
) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = if k == 0 {
            coeff_fmt(c, false)
        } else {
            format!("{}{}", coeff_fmt(c, true), power(k))
        };
        if !out.is_empty() && !term.starts_with('-') {
            out.push('+');
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn plain_coeff(c: &Rational, has_power: bool) -> String {
    let sign = if c.is_negative() { "-" } else { "" };
    let a = c.abs();
    match (has_power, a.is_integer()) {
        (true, true) if a.is_one() => sign.to_string(),
        (true, false) => format!("{sign}({})", rational_to_string(&a)),
        _ => format!("{sign}{}", rational_to_string(&a)),
    }
}

/// LaTeX form of a rational coefficient.
pub fn latex_rational(c: &Rational) -> String {
    latex_coeff(c, false)
}

fn latex_coeff(c: &Rational, has_power: bool) -> String {
    let sign = if c.is_negative() { "-" } else { "" };
    let a = c.abs();
    if a.is_integer() {
        if has_power && a.is_one() {
            sign.to_string()
        } else {
            format!("{sign}{}", a.numer())
        }
    } else {
        format!("{sign}\\frac{{{}}}{{{}}}", a.numer(), a.denom())
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain_string())
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LambdaPoly({self})")
    }
}

/// Substitutes λ := x into `p`.
pub fn poly_eval(p: &LambdaPoly, x: &Rational) -> Rational {
    p.eval(x)
}

impl Add<&LambdaPoly> for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LambdaPoly {
    type Output = LambdaPoly;
    fn add(mut self, rhs: LambdaPoly) -> LambdaPoly {
        self += &rhs;
        self
    }
}

impl Add<&LambdaPoly> for LambdaPoly {
    type Output = LambdaPoly;
    fn add(mut self, rhs: &LambdaPoly) -> LambdaPoly {
        self += rhs;
        self
    }
}

impl AddAssign<&LambdaPoly> for LambdaPoly {
    fn add_assign(&mut self, rhs: &LambdaPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.normalize();
    }
}

impl Sub<&LambdaPoly> for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LambdaPoly {
    type Output = LambdaPoly;
    fn sub(mut self, rhs: LambdaPoly) -> LambdaPoly {
        self -= &rhs;
        self
    }
}

impl Sub<&LambdaPoly> for LambdaPoly {
    type Output = LambdaPoly;
    fn sub(mut self, rhs: &LambdaPoly) -> LambdaPoly {
        self -= rhs;
        self
    }
}

impl SubAssign<&LambdaPoly> for LambdaPoly {
    fn sub_assign(&mut self, rhs: &LambdaPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.normalize();
    }
}

impl Neg for LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        -self.clone()
    }
}

impl Mul<&LambdaPoly> for &LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LambdaPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        LambdaPoly::new(out)
    }
}

impl Mul for LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: LambdaPoly) -> LambdaPoly {
        &self * &rhs
    }
}

impl Mul<&LambdaPoly> for LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        &self * rhs
    }
}

impl MulAssign<&LambdaPoly> for LambdaPoly {
    fn mul_assign(&mut self, rhs: &LambdaPoly) {
        *self = &*self * rhs;
    }
}

impl LambdaPoly {
    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl Zero for LambdaPoly {
    fn zero() -> Self {
        LambdaPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for LambdaPoly {
    fn one() -> Self {
        LambdaPoly::constant(Rational::one())
    }
}

/// A coefficient ring usable by every algorithm in the crate.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn from_rational(r: Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    /// Product of two borrowed values.
    fn mul_ref(&self, rhs: &Self) -> Self;

    /// Multiplication by a rational constant.
    fn scale(&self, r: &Rational) -> Self;

    /// Inverse, if the value is a unit of the ring.
    fn unit_inverse(&self) -> Option<Self>;

    /// Exact quotient by `lambda^i` where `lambda` is the λ of the current
    /// domain. `None` when the quotient does not exist in the ring.
    fn div_lambda_pow(&self, lambda: &Self, i: usize) -> Option<Self>;

    fn to_scalar(&self) -> Scalar;

    fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

impl Coeff for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn scale(&self, r: &Rational) -> Self {
        self * r
    }

    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn div_lambda_pow(&self, lambda: &Self, i: usize) -> Option<Self> {
        if i == 0 {
            return Some(self.clone());
        }
        if lambda.is_zero() {
            return None;
        }
        Some(self / Coeff::pow(lambda, i))
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::Rational(self.clone())
    }
}

impl Coeff for LambdaPoly {
    fn from_rational(r: Rational) -> Self {
        LambdaPoly::constant(r)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn scale(&self, r: &Rational) -> Self {
        LambdaPoly::scale(self, r)
    }

    fn unit_inverse(&self) -> Option<Self> {
        match self.coeffs.as_slice() {
            [c] => Some(LambdaPoly::constant(c.recip())),
            _ => None,
        }
    }

    fn div_lambda_pow(&self, lambda: &Self, i: usize) -> Option<Self> {
        // Only the symbolic λ lives in this ring.
        if *lambda != LambdaPoly::lambda() {
            return None;
        }
        self.shift_down(i)
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::Poly(self.clone())
    }
}

/// The value of λ in the active coefficient domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Lambda<C> {
    value: C,
}

impl Lambda<LambdaPoly> {
    /// λ kept as the polynomial indeterminate.
    pub fn symbolic() -> Self {
        Lambda {
            value: LambdaPoly::lambda(),
        }
    }
}

impl Lambda<Rational> {
    /// λ fixed to a rational value.
    pub fn at(value: Rational) -> Self {
        Lambda { value }
    }
}

impl<C: Coeff> Lambda<C> {
    pub fn value(&self) -> &C {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn pow(&self, k: usize) -> C {
        self.value.pow(k)
    }

    /// `x / λ^i`, failing if the quotient is not in the ring.
    pub fn div_pow(&self, x: &C, i: usize) -> Result<C> {
        x.div_lambda_pow(&self.value, i).ok_or_else(|| {
            if self.is_zero() {
                Error::LambdaZero
            } else {
                Error::Internal(format!("{x:?} is not divisible by lambda^{i}"))
            }
        })
    }

    /// `"sym"` for the symbolic domain, otherwise the rational value.
    pub fn descriptor(&self) -> String {
        match self.value.to_scalar() {
            Scalar::Poly(_) => "sym".to_string(),
            Scalar::Rational(r) => rational_to_string(&r),
        }
    }
}

/// Which coefficient domain a [`Scalar`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Rational,
    Symbolic,
}

impl Domain {
    pub fn zero(self) -> Scalar {
        match self {
            Domain::Rational => Scalar::Rational(Rational::zero()),
            Domain::Symbolic => Scalar::Poly(LambdaPoly::zero()),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Domain::Rational => Scalar::Rational(Rational::one()),
            Domain::Symbolic => Scalar::Poly(LambdaPoly::one()),
        }
    }
}

/// A value in either coefficient domain, for interchange and reporting.
///
/// Serializes a rational as `"p/q"` (or `"p"`) and a polynomial as the
/// ascending array of its coefficient strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(Rational),
    Poly(LambdaPoly),
}

impl Scalar {
    pub fn domain(&self) -> Domain {
        match self {
            Scalar::Rational(_) => Domain::Rational,
            Scalar::Poly(_) => Domain::Symbolic,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Poly(p) => p.is_zero(),
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Poly(a), Scalar::Poly(b)) => Ok(Scalar::Poly(a + b)),
            _ => Err(Error::DomainMismatch),
        }
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a - b)),
            (Scalar::Poly(a), Scalar::Poly(b)) => Ok(Scalar::Poly(a - b)),
            _ => Err(Error::DomainMismatch),
        }
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Poly(a), Scalar::Poly(b)) => Ok(Scalar::Poly(a * b)),
            _ => Err(Error::DomainMismatch),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Poly(a) => Scalar::Poly(-a),
        }
    }

    /// Human-readable canonical string (`1/2`, `2+9λ+7λ^2`).
    pub fn to_plain_string(&self) -> String {
        match self {
            Scalar::Rational(r) => rational_to_string(r),
            Scalar::Poly(p) => p.to_plain_string(),
        }
    }

    pub fn to_latex(&self) -> String {
        match self {
            Scalar::Rational(r) => latex_rational(r),
            Scalar::Poly(p) => p.to_latex(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain_string())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Rational(r) => serializer.serialize_str(&rational_to_string(r)),
            Scalar::Poly(p) => {
                let strings: Vec<String> = p.coeffs().iter().map(rational_to_string).collect();
                strings.serialize(serializer)
            }
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Rational(String),
            Poly(Vec<String>),
        }
        let parse = |s: &str| parse_rational(s).map_err(serde::de::Error::custom);
        match Repr::deserialize(deserializer)? {
            Repr::Rational(s) => Ok(Scalar::Rational(parse(&s)?)),
            Repr::Poly(v) => {
                let coeffs = v
                    .iter()
                    .map(|s| parse(s))
                    .collect::<std::result::Result<_, _>>()?;
                let poly = LambdaPoly::new(coeffs);
                if poly.coeffs().len() != v.len() {
                    return Err(serde::de::Error::custom(
                        "polynomial has trailing zero coefficients",
                    ));
                }
                Ok(Scalar::Poly(poly))
            }
        }
    }
}

/// A λ choice as given on a command line: `"sym"` or a rational string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaSpec {
    Symbolic,
    Value(Rational),
}

impl LambdaSpec {
    pub fn descriptor(&self) -> String {
        match self {
            LambdaSpec::Symbolic => "sym".to_string(),
            LambdaSpec::Value(r) => rational_to_string(r),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LambdaSpec::Value(r) if r.is_zero())
    }
}

impl std::str::FromStr for LambdaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "sym" {
            Ok(LambdaSpec::Symbolic)
        } else {
            parse_rational(s).map(LambdaSpec::Value)
        }
    }
}
