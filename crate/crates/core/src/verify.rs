//! Exact verification of identities between the objects of this crate.
//!
//! Every check reduces to coefficient-by-coefficient equality of Laurent
//! series or to equality of individual ring elements. A passing report means
//! every compared coefficient matched exactly; there is no tolerance anywhere.
//! Failures are data: a report carries the first offending index together
//! with both sides.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{rat, Coeff, Lambda, LambdaPoly, LambdaSpec, Rational, Scalar};
use crate::bernoulli::{
    b_explicit_row, b_higher_order_rows, b_multinomial_row, b_via_recurrence, b_via_series,
    classical_b_by_limit, classical_b_by_stirling, BernoulliRow, ExplicitForm, MULTINOMIAL_MAX_N,
};
use crate::coeff_a::{a_limit_from_table, convolution_sides, CoeffTable};
use crate::combinatorics::{
    bell_partial, binomial, degenerate_stirling2, factorial_rat, generalized_falling,
    scaled_degenerate_stirling, scaled_degenerate_stirling_gf, scaled_degenerate_stirling_table,
    stirling1_signed, BellRoute, Stirling2Route, StirlingTable,
};
use crate::error::{Error, Result};
use crate::series::{
    classical_f_laurent, f_laurent, one_plus_t_pow, LaurentSeries, TruncatedSeries,
};

/// What a report checked. The serialized names are part of the output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityKind {
    /// `(-1)^N (1+t)^N F^{(N)} = Σ a_{i,λ}(N) F^{i+1}`.
    #[serde(rename = "ode_family")]
    OdeFamily,
    /// Convolution identity between rows `n` and `n-1` of the a-table.
    #[serde(rename = "cor_3_4")]
    Convolution,
    /// Higher derivatives of `1/log(1+t)` through signed Stirling numbers.
    #[serde(rename = "eq_41")]
    ClassicalDerivative,
    /// Higher derivatives of `t/log(1+t)` through signed Stirling numbers.
    #[serde(rename = "eq_42")]
    ClassicalScaledDerivative,
    /// `b_{j+N,λ}` from higher-order numbers and the a-table.
    #[serde(rename = "thm_4_1")]
    HigherOrderExpansion,
    /// The same expansion with `(l+1)!` in place of `(l+i)!` in its third sum.
    #[serde(rename = "thm_4_1_printed")]
    HigherOrderExpansionAltDivisor,
    /// The singular part of the same expansion vanishes.
    #[serde(rename = "cor_4_2")]
    SingularPartVanishes,
    #[serde(rename = "bell_routes")]
    BellRoutes,
    #[serde(rename = "stirling2_routes")]
    Stirling2Routes,
    #[serde(rename = "scaled_stirling_routes")]
    ScaledStirlingRoutes,
    #[serde(rename = "stirling_limit")]
    StirlingLimit,
    #[serde(rename = "a_limit")]
    ALimit,
    #[serde(rename = "a_routes")]
    ARoutes,
    #[serde(rename = "b_routes")]
    BRoutes,
    #[serde(rename = "classical_routes")]
    ClassicalRoutes,
    #[serde(rename = "specialization")]
    Specialization,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub lambda: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Half-open range `[from, to)` of indices (exponents of `t` for series
/// identities) that were compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparedRange {
    pub from: i64,
    pub to: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub index: i64,
    pub lhs: Scalar,
    pub rhs: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityKind,
    pub params: Params,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compared: Option<ComparedRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Names the alternative route for cross-route reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
}

impl IdentityReport {
    fn new(identity: IdentityKind, params: Params) -> Self {
        IdentityReport {
            identity,
            params,
            verdict: Verdict::Pass,
            compared: None,
            witness: None,
            route: None,
        }
    }

    fn route(mut self, name: &str) -> Self {
        self.route = Some(name.to_string());
        self
    }

    fn range(mut self, from: i64, to: i64) -> Self {
        self.compared = Some(ComparedRange { from, to });
        self
    }

    fn outcome(mut self, witness: Option<Witness>) -> Self {
        self.verdict = if witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        self.witness = witness;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn witness<C: Coeff>(index: i64, lhs: &C, rhs: &C) -> Witness {
    Witness {
        index,
        lhs: lhs.to_scalar(),
        rhs: rhs.to_scalar(),
        note: None,
    }
}

fn noted(mut w: Witness, note: String) -> Witness {
    w.note = Some(note);
    w
}

/// Compares two Laurent series from exponent `from` (or the deeper pole) up
/// to the smaller precision.
fn compare_laurent<C: Coeff>(
    lhs: &LaurentSeries<C>,
    rhs: &LaurentSeries<C>,
    from: i64,
) -> (ComparedRange, Option<Witness>) {
    let deepest = -(lhs.pole().max(rhs.pole()) as i64);
    let from = from.min(deepest);
    let to = lhs.precision().min(rhs.precision());
    let found = (from..to).find_map(|e| {
        let a = lhs.coeff(e).expect("below precision");
        let b = rhs.coeff(e).expect("below precision");
        (a != b).then(|| witness(e, &a, &b))
    });
    (ComparedRange { from, to }, found)
}

/// First index where two equally indexed sequences disagree.
fn compare_rows<C: Coeff>(lhs: &[C], rhs: &[C]) -> Option<Witness> {
    lhs.iter()
        .zip(rhs)
        .enumerate()
        .find_map(|(n, (a, b))| (a != b).then(|| witness(n as i64, a, b)))
}

/// First `(n, k)` where two triangles disagree; the witness index is `n`.
fn compare_triangles<C: Coeff>(lhs: &[Vec<C>], rhs: &[Vec<C>]) -> Option<Witness> {
    for (n, (ra, rb)) in lhs.iter().zip(rhs).enumerate() {
        if ra.len() != rb.len() {
            return Some(Witness {
                index: n as i64,
                lhs: Scalar::Rational(rat(ra.len() as i64)),
                rhs: Scalar::Rational(rat(rb.len() as i64)),
                note: Some("row lengths differ".into()),
            });
        }
        for (k, (a, b)) in ra.iter().zip(rb).enumerate() {
            if a != b {
                return Some(noted(witness(n as i64, a, b), format!("k={k}")));
            }
        }
    }
    None
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

/// Derivatives `G^{(0..=max)}` and powers `G^{0..=max+1}` of a Laurent series
/// `G`, computed once and truncated per use.
pub struct LaurentCache<C> {
    derivs: Vec<LaurentSeries<C>>,
    powers: Vec<LaurentSeries<C>>,
}

impl<C: Coeff> LaurentCache<C> {
    pub fn new(g: LaurentSeries<C>, max: usize) -> Result<Self> {
        let mut derivs = vec![g.clone()];
        for _ in 0..max {
            let next = derivs.last().expect("nonempty").derivative()?;
            derivs.push(next);
        }
        let mut powers = vec![LaurentSeries::from_series(TruncatedSeries::one(
            g.body().order(),
        ))];
        for _ in 0..=max {
            let next = powers.last().expect("nonempty") * &g;
            powers.push(next);
        }
        Ok(LaurentCache { derivs, powers })
    }

    fn max(&self) -> usize {
        self.derivs.len() - 1
    }
}

/// `F = 1/log_λ(1+t)` to body order `order + max`, with derivatives and powers.
pub fn f_cache<C: Coeff>(lambda: &Lambda<C>, max: usize, order: usize) -> Result<LaurentCache<C>> {
    LaurentCache::new(f_laurent(lambda, order + max)?, max)
}

/// `F_0 = 1/log(1+t)` to body order `order + max`, with derivatives and powers.
pub fn classical_cache(max: usize, order: usize) -> Result<LaurentCache<Rational>> {
    LaurentCache::new(classical_f_laurent(order + max), max)
}

fn check_order(big_n: usize, order: usize) -> Result<()> {
    if order < big_n + 2 {
        return Err(Error::InsufficientOrder {
            need: big_n + 2,
            have: order,
        });
    }
    Ok(())
}

fn check_cache<C>(cache: &LaurentCache<C>, big_n: usize) -> Result<()>
where
    C: Coeff,
{
    if big_n > cache.max() {
        return Err(Error::OutOfRange(format!(
            "series cache covers N <= {}, got {big_n}",
            cache.max()
        )));
    }
    Ok(())
}

/// Checks `(-1)^N (1+t)^N F^{(N)} = Σ_{i=0}^{N} a_{i,λ}(N) F^{i+1}` with `F`
/// expanded to body order `order + N`.
pub fn verify_ode<C: Coeff>(
    lambda: &Lambda<C>,
    table: &CoeffTable<C>,
    big_n: usize,
    order: usize,
) -> Result<IdentityReport> {
    check_order(big_n, order)?;
    let cache = f_cache(lambda, big_n, order)?;
    ode_report(&lambda.descriptor(), table, &cache, big_n, order)
}

fn ode_report<C: Coeff>(
    lambda: &str,
    table: &CoeffTable<C>,
    cache: &LaurentCache<C>,
    big_n: usize,
    order: usize,
) -> Result<IdentityReport> {
    if big_n == 0 {
        return Err(Error::OutOfRange(
            "the differential equations start at N = 1".into(),
        ));
    }
    check_order(big_n, order)?;
    check_cache(cache, big_n)?;
    if big_n > table.n_max() {
        return Err(Error::OutOfRange(format!(
            "a-table covers N <= {}, got {big_n}",
            table.n_max()
        )));
    }
    // Standalone precisions when F has body order M = order + N.
    let m = (order + big_n) as i64;
    let deriv = cache.derivs[big_n].truncate_precision(m - (big_n as i64 + 1));
    let mut lhs = deriv.mul_series(&one_plus_t_pow(big_n, order + big_n));
    if big_n % 2 == 1 {
        lhs = -&lhs;
    }
    let mut rhs: Option<LaurentSeries<C>> = None;
    for i in 0..=big_n {
        let k = i + 1;
        let term = cache.powers[k]
            .truncate_precision(m - k as i64)
            .scale(table.get(i, big_n));
        rhs = Some(match rhs {
            None => term,
            Some(acc) => &acc + &term,
        });
    }
    let rhs = rhs.expect("at least one term");
    let (range, found) = compare_laurent(&lhs, &rhs, -(big_n as i64 + 1));
    Ok(IdentityReport::new(
        IdentityKind::OdeFamily,
        Params {
            big_n: Some(big_n),
            order: Some(order),
            lambda: lambda.to_string(),
            ..Params::default()
        },
    )
    .range(range.from, range.to)
    .outcome(found))
}

/// Checks the convolution identity for row `n` and every `1 ≤ j ≤ n`; the
/// witness index is `j`.
pub fn verify_convolution<C: Coeff>(
    lambda: &Lambda<C>,
    table: &CoeffTable<C>,
    n: usize,
) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::OutOfRange(
            "the convolution identity needs n >= 1".into(),
        ));
    }
    let mut found = None;
    for j in 1..=n {
        let (lhs, rhs) = convolution_sides(lambda, table, n, j)?;
        if lhs != rhs {
            found = Some(witness(j as i64, &lhs, &rhs));
            break;
        }
    }
    Ok(IdentityReport::new(
        IdentityKind::Convolution,
        Params {
            n: Some(n),
            lambda: lambda.descriptor(),
            ..Params::default()
        },
    )
    .range(1, n as i64 + 1)
    .outcome(found))
}

/// Which classical derivative formula to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalFormula {
    /// `F_0^{(N)} = (1+t)^{-N} Σ_k (-1)^k k! s(N,k) F_0^{k+1}`.
    Reciprocal,
    /// `(tF_0)^{(n)} = (1+t)^{-n} Σ_i (-1)^i i! (t s(n,i) + n(1+t) s(n-1,i)) F_0^{i+1}`.
    Scaled,
}

/// Checks one of the classical derivative formulas at `λ = 0`, with
/// `F_0 = 1/log(1+t)` expanded to body order `order + N`.
pub fn verify_classical_derivative(
    big_n: usize,
    order: usize,
    which: ClassicalFormula,
) -> Result<IdentityReport> {
    check_order(big_n, order)?;
    let cache = classical_cache(big_n, order)?;
    let s1 = stirling1_signed(big_n);
    classical_report(&cache, &s1, big_n, order, which)
}

fn classical_report(
    cache: &LaurentCache<Rational>,
    s1: &StirlingTable<Rational>,
    big_n: usize,
    order: usize,
    which: ClassicalFormula,
) -> Result<IdentityReport> {
    if big_n == 0 {
        return Err(Error::OutOfRange(
            "derivative order must be at least 1".into(),
        ));
    }
    check_order(big_n, order)?;
    check_cache(cache, big_n)?;
    if big_n > s1.n_max() {
        return Err(Error::OutOfRange(format!(
            "Stirling table covers n <= {}, got {big_n}",
            s1.n_max()
        )));
    }
    let m = (order + big_n) as i64;
    let inv = one_plus_t_pow::<Rational>(big_n, order + big_n).reciprocal()?;
    let n_rat = rat(big_n as i64);
    let lhs = match which {
        ClassicalFormula::Reciprocal => {
            cache.derivs[big_n].truncate_precision(m - (big_n as i64 + 1))
        }
        ClassicalFormula::Scaled => {
            // t·F_0 has no pole; differentiate it directly.
            let f = cache.derivs[0].truncate_precision(m - 1);
            let mut g = LaurentSeries::from_series(f.body().clone());
            for _ in 0..big_n {
                g = g.derivative()?;
            }
            g
        }
    };
    let mut sum: Option<LaurentSeries<Rational>> = None;
    for i in 0..=big_n {
        let k = i + 1;
        let weight = factorial_rat(i) * if i % 2 == 0 { rat(1) } else { rat(-1) };
        let power = cache.powers[k].truncate_precision(m - k as i64);
        let term = match which {
            ClassicalFormula::Reciprocal => power.scale(&(weight * s1.get(big_n, i))),
            ClassicalFormula::Scaled => {
                let lower = if i < big_n {
                    s1.get(big_n - 1, i) * &n_rat
                } else {
                    Rational::zero()
                };
                let poly = TruncatedSeries::from_poly(
                    vec![lower.clone(), s1.get(big_n, i) + lower],
                    order + big_n,
                );
                power.mul_series(&poly.scale(&weight))
            }
        };
        sum = Some(match sum {
            None => term,
            Some(acc) => &acc + &term,
        });
    }
    let rhs = sum.expect("at least one term").mul_series(&inv);
    let (range, found) = compare_laurent(&lhs, &rhs, -(big_n as i64 + 1));
    let (kind, params) = match which {
        ClassicalFormula::Reciprocal => (
            IdentityKind::ClassicalDerivative,
            Params {
                big_n: Some(big_n),
                order: Some(order),
                lambda: "0".into(),
                ..Params::default()
            },
        ),
        ClassicalFormula::Scaled => (
            IdentityKind::ClassicalScaledDerivative,
            Params {
                n: Some(big_n),
                order: Some(order),
                lambda: "0".into(),
                ..Params::default()
            },
        ),
    };
    Ok(IdentityReport::new(kind, params)
        .range(range.from, range.to)
        .outcome(found))
}

/// Divisor used in the third sum of the higher-order expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThirdSumDivisor {
    /// `(l+i)!`, as the term-by-term derivation produces.
    LPlusI,
    /// `(l+1)!`, the alternative reading; `1/m!` is taken as zero for `m < 0`.
    LPlusOne,
}

fn inv_factorial(m: i64) -> Rational {
    if m < 0 {
        Rational::zero()
    } else {
        factorial_rat(m as usize).recip()
    }
}

/// Coefficient of `t^j` in the expansion of `(tF)^{(N)}` obtained from the
/// differential equations and higher-order numbers. For `j ≥ 0` the result is
/// multiplied by `j!`, so it should equal `b_{j+N,λ}`; for `j < 0` it is the
/// raw singular coefficient, which should vanish.
///
/// `rows[r-1]` must hold `b^{(r)}` for `r ≤ N+1` through index `j+N`, and the
/// table must cover rows `N-1` and `N`.
pub fn higher_order_expansion<C: Coeff>(
    table: &CoeffTable<C>,
    rows: &[BernoulliRow<C>],
    j: i64,
    big_n: usize,
    divisor: ThirdSumDivisor,
) -> Result<C> {
    if big_n == 0 {
        return Err(Error::OutOfRange("the expansion needs N >= 1".into()));
    }
    if big_n > table.n_max() {
        return Err(Error::OutOfRange(format!(
            "a-table covers N <= {}, got {big_n}",
            table.n_max()
        )));
    }
    if j < -(big_n as i64) {
        return Err(Error::OutOfRange(format!(
            "need j >= -N, got j={j}, N={big_n}"
        )));
    }
    let top = j + big_n as i64;
    if rows.len() < big_n + 1
        || rows
            .iter()
            .take(big_n + 1)
            .any(|r| (r.n_max() as i64) < top)
    {
        return Err(Error::OutOfRange(format!(
            "need b^(r) for r <= {} through index {top}",
            big_n + 1
        )));
    }
    let n = big_n as i64;
    let b = |r: usize, idx: i64| -> &C {
        assert!(idx >= 0, "negative Bernoulli index");
        rows[r - 1].get(idx as usize)
    };
    let weight = |l: i64| binomial((n + j - l - 1) as usize, j - l);
    let n_rat = rat(n);

    let mut acc = C::zero();
    for l in -n..=j {
        let c = weight(l);
        let sign = if odd(n + j + l) { rat(-1) } else { rat(1) };
        for i in 0.max(-l)..=n {
            let idx = l + i;
            let w = &c * &sign * inv_factorial(idx);
            acc += &b(i as usize + 1, idx)
                .mul_ref(table.get(i as usize, big_n))
                .scale(&w);
        }
        for i in 0.max(-l - 1)..n {
            let idx = l + i + 1;
            let w = -(&c * &sign * &n_rat * inv_factorial(idx));
            acc += &b(i as usize + 1, idx)
                .mul_ref(table.get(i as usize, big_n - 1))
                .scale(&w);
        }
        if l >= -(n - 1) {
            for i in 0.max(-l)..n {
                let idx = l + i;
                let div = match divisor {
                    ThirdSumDivisor::LPlusI => inv_factorial(idx),
                    ThirdSumDivisor::LPlusOne => inv_factorial(l + 1),
                };
                let w = -(&c * &sign * &n_rat * div);
                acc += &b(i as usize + 1, idx)
                    .mul_ref(table.get(i as usize, big_n - 1))
                    .scale(&w);
            }
        }
    }
    if j >= 0 {
        acc = acc.scale(&factorial_rat(j as usize));
    }
    Ok(acc)
}

/// Checks the higher-order expansion of `b_{j+N,λ}` against `reference`.
pub fn expansion_report<C: Coeff>(
    lambda: &str,
    table: &CoeffTable<C>,
    rows: &[BernoulliRow<C>],
    reference: &[C],
    j: usize,
    big_n: usize,
    divisor: ThirdSumDivisor,
) -> Result<IdentityReport> {
    let value = higher_order_expansion(table, rows, j as i64, big_n, divisor)?;
    let idx = j + big_n;
    let expected = reference
        .get(idx)
        .ok_or_else(|| Error::OutOfRange(format!("reference row ends before index {idx}")))?;
    let kind = match divisor {
        ThirdSumDivisor::LPlusI => IdentityKind::HigherOrderExpansion,
        ThirdSumDivisor::LPlusOne => IdentityKind::HigherOrderExpansionAltDivisor,
    };
    let found = (value != *expected).then(|| witness(idx as i64, expected, &value));
    Ok(IdentityReport::new(
        kind,
        Params {
            big_n: Some(big_n),
            j: Some(j as i64),
            lambda: lambda.to_string(),
            ..Params::default()
        },
    )
    .outcome(found))
}

/// Checks that the singular coefficient at `t^j` vanishes, for `N ≥ 2` and
/// `-(N-1) ≤ j ≤ -1`.
pub fn singular_report<C: Coeff>(
    lambda: &str,
    table: &CoeffTable<C>,
    rows: &[BernoulliRow<C>],
    j: i64,
    big_n: usize,
) -> Result<IdentityReport> {
    if big_n < 2 || j > -1 || j < -(big_n as i64 - 1) {
        return Err(Error::OutOfRange(format!(
            "need N >= 2 and -(N-1) <= j <= -1, got N={big_n}, j={j}"
        )));
    }
    let value = higher_order_expansion(table, rows, j, big_n, ThirdSumDivisor::LPlusI)?;
    let found = (!value.is_zero()).then(|| witness(j, &value, &C::zero()));
    Ok(IdentityReport::new(
        IdentityKind::SingularPartVanishes,
        Params {
            big_n: Some(big_n),
            j: Some(j),
            lambda: lambda.to_string(),
            ..Params::default()
        },
    )
    .outcome(found))
}

/// Standalone check of the expansion of `b_{j+N,λ}`.
pub fn verify_expansion<C: Coeff>(
    lambda: &Lambda<C>,
    j: usize,
    big_n: usize,
    divisor: ThirdSumDivisor,
) -> Result<IdentityReport> {
    let table = CoeffTable::by_recurrence(lambda, big_n);
    let rows = b_higher_order_rows(lambda, big_n + 1, j + big_n)?;
    let reference = b_via_series(lambda, j + big_n)?;
    expansion_report(
        &lambda.descriptor(),
        &table,
        &rows,
        &reference.values,
        j,
        big_n,
        divisor,
    )
}

/// Standalone check that the singular coefficient at `t^j` vanishes.
pub fn verify_singular<C: Coeff>(
    lambda: &Lambda<C>,
    j: i64,
    big_n: usize,
) -> Result<IdentityReport> {
    let table = CoeffTable::by_recurrence(lambda, big_n);
    let top = (j + big_n as i64).max(0) as usize;
    let rows = b_higher_order_rows(lambda, big_n + 1, top)?;
    singular_report(&lambda.descriptor(), &table, &rows, j, big_n)
}

/// Which identities a verification run covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Ode,
    Convolution,
    ClassicalDerivative,
    ClassicalScaledDerivative,
    HigherOrderExpansion,
    SingularPart,
    /// Everything above plus the cross-route agreement checks.
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }

    fn needs_lambda(self) -> bool {
        !matches!(
            self,
            Suite::ClassicalDerivative | Suite::ClassicalScaledDerivative
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub suite: Suite,
    /// Largest `N` for the differential equations and the a-table.
    pub max_big_n: usize,
    /// Largest `n` for the Bernoulli and Stirling route comparisons.
    pub max_n: usize,
    /// Largest `j` in the higher-order expansion grid.
    pub max_j: usize,
    /// Truncation order of the series identities.
    pub order: usize,
    pub lambda: LambdaSpec,
}

impl VerifyConfig {
    /// `N_max = 8`, `n_max = N_max`, `j_max = 8`, order `2·max(N_max, n_max) + 8`.
    pub fn new(suite: Suite, lambda: LambdaSpec) -> Self {
        Self::sized(suite, lambda, 8, 8, 8, None)
    }

    pub fn sized(
        suite: Suite,
        lambda: LambdaSpec,
        max_big_n: usize,
        max_n: usize,
        max_j: usize,
        order: Option<usize>,
    ) -> Self {
        VerifyConfig {
            suite,
            max_big_n,
            max_n,
            max_j,
            order: order.unwrap_or(2 * max_big_n.max(max_n) + 8),
            lambda,
        }
    }

    /// Largest index `j + N` any expansion job reaches.
    fn b_index_max(&self) -> usize {
        (self.max_j + self.max_big_n).max(self.max_n)
    }
}

/// Reports that decide the verdict, and informational findings that do not.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub reports: Vec<IdentityReport>,
    pub findings: Vec<IdentityReport>,
}

impl VerifyOutcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(IdentityReport::passed)
    }
}

/// Precomputed inputs shared by the jobs of one run. Tests replace entries
/// to check that corruptions are detected.
#[derive(Clone, Debug)]
pub struct VerifyTables<C> {
    pub a: CoeffTable<C>,
    /// `b^{(r)}` at `rows[r-1]`.
    pub b_rows: Vec<BernoulliRow<C>>,
    pub s1: StirlingTable<Rational>,
}

impl<C: Coeff> VerifyTables<C> {
    pub fn build(lambda: &Lambda<C>, cfg: &VerifyConfig) -> Result<Self> {
        Ok(VerifyTables {
            a: CoeffTable::by_recurrence(lambda, cfg.max_big_n),
            b_rows: b_higher_order_rows(lambda, cfg.max_big_n + 1, cfg.b_index_max())?,
            s1: stirling1_signed(cfg.max_big_n.max(cfg.max_n)),
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum Job {
    Ode(usize),
    Convolution(usize),
    ClassicalDerivative(usize),
    ClassicalScaledDerivative(usize),
    Expansion { j: usize, big_n: usize },
    ExpansionAltDivisor { j: usize, big_n: usize },
    Singular { j: i64, big_n: usize },
    BellRoutes(usize),
    Stirling2Routes,
    ScaledStirlingRoutes,
    StirlingLimit,
    ALimit,
    ARoutes,
    BRoutes,
    ClassicalRoutes,
    Specialization,
}

/// Grid on which the `(l+1)!` reading is evaluated for the findings list.
const ALT_DIVISOR_GRID: usize = 3;

fn plan(cfg: &VerifyConfig, symbolic: bool) -> Vec<Job> {
    let s = cfg.suite;
    let mut jobs = Vec::new();
    if s.includes(Suite::Ode) {
        jobs.extend((1..=cfg.max_big_n).map(Job::Ode));
    }
    if s.includes(Suite::Convolution) {
        jobs.extend((1..=cfg.max_big_n).map(Job::Convolution));
    }
    if s.includes(Suite::ClassicalDerivative) {
        jobs.extend((1..=cfg.max_big_n).map(Job::ClassicalDerivative));
    }
    if s.includes(Suite::ClassicalScaledDerivative) {
        jobs.extend((1..=cfg.max_big_n).map(Job::ClassicalScaledDerivative));
    }
    if s.includes(Suite::HigherOrderExpansion) {
        for big_n in 1..=cfg.max_big_n {
            jobs.extend((0..=cfg.max_j).map(|j| Job::Expansion { j, big_n }));
        }
        for big_n in 1..=cfg.max_big_n.min(ALT_DIVISOR_GRID) {
            jobs.extend(
                (0..=cfg.max_j.min(ALT_DIVISOR_GRID))
                    .map(|j| Job::ExpansionAltDivisor { j, big_n }),
            );
        }
    }
    if s.includes(Suite::SingularPart) {
        for big_n in 2..=cfg.max_big_n {
            jobs.extend((-(big_n as i64 - 1)..=-1).map(|j| Job::Singular { j, big_n }));
        }
    }
    if s == Suite::All {
        jobs.extend((0..=cfg.max_n).map(Job::BellRoutes));
        jobs.extend([Job::Stirling2Routes, Job::ScaledStirlingRoutes]);
        if symbolic {
            jobs.extend([Job::StirlingLimit, Job::ALimit]);
        }
        jobs.extend([Job::ARoutes, Job::BRoutes, Job::ClassicalRoutes]);
        if !symbolic {
            jobs.push(Job::Specialization);
        }
    }
    jobs
}

struct Context<'a, C> {
    lambda: &'a Lambda<C>,
    descriptor: String,
    cfg: &'a VerifyConfig,
    tables: &'a VerifyTables<C>,
    f: Option<LaurentCache<C>>,
    classical: Option<LaurentCache<Rational>>,
}

fn as_rational(s: Scalar) -> Option<Rational> {
    match s {
        Scalar::Rational(r) => Some(r),
        Scalar::Poly(_) => None,
    }
}

fn as_poly(s: Scalar) -> Option<LambdaPoly> {
    match s {
        Scalar::Poly(p) => Some(p),
        Scalar::Rational(_) => None,
    }
}

impl<C: Coeff> Context<'_, C> {
    fn params(&self) -> Params {
        Params {
            lambda: self.descriptor.clone(),
            ..Params::default()
        }
    }

    fn cross(
        &self,
        kind: IdentityKind,
        route: &str,
        n: usize,
        found: Option<Witness>,
    ) -> IdentityReport {
        IdentityReport::new(
            kind,
            Params {
                n: Some(n),
                ..self.params()
            },
        )
        .route(route)
        .range(0, n as i64 + 1)
        .outcome(found)
    }

    fn run(&self, job: Job) -> Result<Vec<IdentityReport>> {
        let lambda = self.lambda;
        let t = self.tables;
        let cfg = self.cfg;
        let one = |r: IdentityReport| Ok(vec![r]);
        match job {
            Job::Ode(big_n) => one(ode_report(
                &self.descriptor,
                &t.a,
                self.f.as_ref().expect("series cache"),
                big_n,
                cfg.order,
            )?),
            Job::Convolution(n) => one(verify_convolution(lambda, &t.a, n)?),
            Job::ClassicalDerivative(big_n) => one(classical_report(
                self.classical.as_ref().expect("classical cache"),
                &t.s1,
                big_n,
                cfg.order,
                ClassicalFormula::Reciprocal,
            )?),
            Job::ClassicalScaledDerivative(n) => one(classical_report(
                self.classical.as_ref().expect("classical cache"),
                &t.s1,
                n,
                cfg.order,
                ClassicalFormula::Scaled,
            )?),
            Job::Expansion { j, big_n } => one(expansion_report(
                &self.descriptor,
                &t.a,
                &t.b_rows,
                &t.b_rows[0].values,
                j,
                big_n,
                ThirdSumDivisor::LPlusI,
            )?),
            Job::ExpansionAltDivisor { j, big_n } => one(expansion_report(
                &self.descriptor,
                &t.a,
                &t.b_rows,
                &t.b_rows[0].values,
                j,
                big_n,
                ThirdSumDivisor::LPlusOne,
            )?),
            Job::Singular { j, big_n } => one(singular_report(
                &self.descriptor,
                &t.a,
                &t.b_rows,
                j,
                big_n,
            )?),
            Job::BellRoutes(n) => {
                let xs: Vec<C> = (1..=n.max(1))
                    .map(|m| generalized_falling(lambda, &C::one(), m))
                    .collect();
                let mut found = None;
                for k in 0..=n {
                    let a = bell_partial(n, k, &xs, BellRoute::PartitionSum)?;
                    let b = bell_partial(n, k, &xs, BellRoute::GeneratingFunction)?;
                    if a != b {
                        found = Some(witness(k as i64, &a, &b));
                        break;
                    }
                }
                one(IdentityReport::new(
                    IdentityKind::BellRoutes,
                    Params {
                        n: Some(n),
                        ..self.params()
                    },
                )
                .route("generating_function")
                .range(0, n as i64 + 1)
                .outcome(found))
            }
            Job::Stirling2Routes => {
                let gf =
                    degenerate_stirling2(lambda, cfg.max_n, Stirling2Route::GeneratingFunction);
                let bell = degenerate_stirling2(lambda, cfg.max_n, Stirling2Route::BellFormula);
                one(self.cross(
                    IdentityKind::Stirling2Routes,
                    "alternating_sum",
                    cfg.max_n,
                    compare_triangles(gf.rows(), bell.rows()),
                ))
            }
            Job::ScaledStirlingRoutes => {
                let mut found = None;
                'outer: for n in 0..=cfg.max_n {
                    for k in 0..=n {
                        let a = scaled_degenerate_stirling(lambda, n, k);
                        let b = scaled_degenerate_stirling_gf(lambda, n, k)?;
                        if a != b {
                            found = Some(noted(witness(n as i64, &a, &b), format!("k={k}")));
                            break 'outer;
                        }
                    }
                }
                one(self.cross(
                    IdentityKind::ScaledStirlingRoutes,
                    "generating_function",
                    cfg.max_n,
                    found,
                ))
            }
            Job::StirlingLimit => {
                let n_max = cfg.max_n.min(t.s1.n_max());
                let scaled = scaled_degenerate_stirling_table(lambda, n_max);
                let zero = Rational::zero();
                let at_zero: Vec<Vec<Rational>> = scaled
                    .rows()
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|v| {
                                as_poly(v.to_scalar())
                                    .map(|p| p.eval(&zero))
                                    .ok_or(Error::DomainMismatch)
                            })
                            .collect::<Result<_>>()
                    })
                    .collect::<Result<_>>()?;
                let found = compare_triangles(&at_zero, &t.s1.rows()[..=n_max]);
                one(self.cross(IdentityKind::StirlingLimit, "first_kind", n_max, found))
            }
            Job::ALimit => {
                let n_max = t.a.n_max().min(t.s1.n_max());
                let mut found = None;
                'outer: for big_n in 0..=n_max {
                    for i in 0..=big_n {
                        let p =
                            as_poly(t.a.get(i, big_n).to_scalar()).ok_or(Error::DomainMismatch)?;
                        let lhs = p.eval(&Rational::zero());
                        // Row 0 is the convention [1], which the formula also gives.
                        let rhs = a_limit_from_table(&t.s1, i, big_n)?;
                        if lhs != rhs {
                            found =
                                Some(noted(witness(big_n as i64, &lhs, &rhs), format!("i={i}")));
                            break 'outer;
                        }
                    }
                }
                one(IdentityReport::new(
                    IdentityKind::ALimit,
                    Params {
                        big_n: Some(n_max),
                        ..self.params()
                    },
                )
                .route("first_kind")
                .range(0, n_max as i64 + 1)
                .outcome(found))
            }
            Job::ARoutes => {
                let n_max = t.a.n_max();
                let others: Vec<(&str, CoeffTable<C>)> = vec![
                    (
                        "unrolled",
                        CoeffTable::by_unrolled_recurrence(lambda, n_max),
                    ),
                    ("falling", CoeffTable::by_falling_form(lambda, n_max)?),
                    ("stirling", CoeffTable::by_stirling_form(lambda, n_max)),
                ];
                Ok(others
                    .into_iter()
                    .map(|(name, other)| {
                        IdentityReport::new(
                            IdentityKind::ARoutes,
                            Params {
                                big_n: Some(n_max),
                                ..self.params()
                            },
                        )
                        .route(name)
                        .range(0, n_max as i64 + 1)
                        .outcome(compare_triangles(t.a.rows(), other.rows()))
                    })
                    .collect())
            }
            Job::BRoutes => {
                let n_max = cfg.max_n;
                let reference = &t.b_rows[0].values[..=n_max];
                let mut out = Vec::new();
                let recurrence = b_via_recurrence(lambda, n_max)?;
                out.push(self.cross(
                    IdentityKind::BRoutes,
                    "recurrence",
                    n_max,
                    compare_rows(reference, &recurrence.values),
                ));
                let m_max = n_max.min(MULTINOMIAL_MAX_N);
                let multinomial = b_multinomial_row(lambda, m_max)?;
                out.push(self.cross(
                    IdentityKind::BRoutes,
                    "multinomial",
                    m_max,
                    compare_rows(&reference[..=m_max], &multinomial.values),
                ));
                for (name, form) in [
                    ("explicit_a", ExplicitForm::AForm),
                    ("explicit_stirling", ExplicitForm::StirlingForm),
                    ("explicit_falling", ExplicitForm::FallingForm),
                ] {
                    let row = b_explicit_row(lambda, n_max, form)?;
                    out.push(self.cross(
                        IdentityKind::BRoutes,
                        name,
                        n_max,
                        compare_rows(reference, &row.values),
                    ));
                }
                Ok(out)
            }
            Job::ClassicalRoutes => {
                let n_max = cfg.max_n;
                let found = compare_rows(
                    &classical_b_by_limit(n_max),
                    &classical_b_by_stirling(n_max),
                );
                one(IdentityReport::new(
                    IdentityKind::ClassicalRoutes,
                    Params {
                        n: Some(n_max),
                        lambda: "0".into(),
                        ..Params::default()
                    },
                )
                .route("first_kind")
                .range(0, n_max as i64 + 1)
                .outcome(found))
            }
            Job::Specialization => {
                let value = as_rational(lambda.value().to_scalar()).ok_or(Error::DomainMismatch)?;
                let sym = Lambda::symbolic();
                let n_max = cfg.max_n;
                let symbolic_b = b_via_series(&sym, n_max)?;
                let evaluated: Vec<Rational> =
                    symbolic_b.values.iter().map(|p| p.eval(&value)).collect();
                let here: Vec<Rational> = t.b_rows[0].values[..=n_max]
                    .iter()
                    .map(|c| as_rational(c.to_scalar()).ok_or(Error::DomainMismatch))
                    .collect::<Result<_>>()?;
                let b_report = self.cross(
                    IdentityKind::Specialization,
                    "b_symbolic",
                    n_max,
                    compare_rows(&here, &evaluated),
                );
                let big_n = t.a.n_max();
                let symbolic_a = CoeffTable::by_recurrence(&sym, big_n);
                let evaluated: Vec<Vec<Rational>> = symbolic_a
                    .rows()
                    .iter()
                    .map(|row| row.iter().map(|p| p.eval(&value)).collect())
                    .collect();
                let here: Vec<Vec<Rational>> =
                    t.a.rows()
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|c| as_rational(c.to_scalar()).ok_or(Error::DomainMismatch))
                                .collect::<Result<_>>()
                        })
                        .collect::<Result<_>>()?;
                let a_report = IdentityReport::new(
                    IdentityKind::Specialization,
                    Params {
                        big_n: Some(big_n),
                        ..self.params()
                    },
                )
                .route("a_symbolic")
                .range(0, big_n as i64 + 1)
                .outcome(compare_triangles(&here, &evaluated));
                Ok(vec![b_report, a_report])
            }
        }
    }
}

fn validate(cfg: &VerifyConfig) -> Result<()> {
    if cfg.max_big_n == 0 {
        return Err(Error::OutOfRange("max N must be at least 1".into()));
    }
    let series_suite = [
        Suite::Ode,
        Suite::ClassicalDerivative,
        Suite::ClassicalScaledDerivative,
    ]
    .iter()
    .any(|&s| cfg.suite.includes(s));
    if series_suite {
        check_order(cfg.max_big_n, cfg.order)?;
    }
    if cfg.suite.needs_lambda() && cfg.lambda.is_zero() {
        return Err(Error::LambdaZero);
    }
    Ok(())
}

/// Runs the configured suite with freshly built tables.
pub fn verify_all(cfg: &VerifyConfig) -> Result<VerifyOutcome> {
    validate(cfg)?;
    match &cfg.lambda {
        LambdaSpec::Symbolic => {
            let lambda = Lambda::symbolic();
            let tables = VerifyTables::build(&lambda, cfg)?;
            verify_all_with(&lambda, cfg, &tables)
        }
        LambdaSpec::Value(v) if v.is_zero() => {
            // Only the λ-free classical formulas reach this point.
            let lambda = Lambda::at(v.clone());
            let tables = VerifyTables {
                a: CoeffTable::by_recurrence(&lambda, cfg.max_big_n),
                b_rows: Vec::new(),
                s1: stirling1_signed(cfg.max_big_n.max(cfg.max_n)),
            };
            verify_all_with(&lambda, cfg, &tables)
        }
        LambdaSpec::Value(v) => {
            let lambda = Lambda::at(v.clone());
            let tables = VerifyTables::build(&lambda, cfg)?;
            verify_all_with(&lambda, cfg, &tables)
        }
    }
}

/// Runs the configured suite against the given tables. Jobs run in parallel
/// on the current rayon pool; the result order depends only on `cfg`.
pub fn verify_all_with<C: Coeff>(
    lambda: &Lambda<C>,
    cfg: &VerifyConfig,
    tables: &VerifyTables<C>,
) -> Result<VerifyOutcome> {
    validate(cfg)?;
    let symbolic = lambda.descriptor() == "sym";
    let jobs = plan(cfg, symbolic);
    let f = if jobs.iter().any(|j| matches!(j, Job::Ode(_))) {
        Some(f_cache(lambda, cfg.max_big_n, cfg.order)?)
    } else {
        None
    };
    let classical = if jobs.iter().any(|j| {
        matches!(
            j,
            Job::ClassicalDerivative(_) | Job::ClassicalScaledDerivative(_)
        )
    }) {
        Some(classical_cache(cfg.max_big_n, cfg.order)?)
    } else {
        None
    };
    let ctx = Context {
        lambda,
        descriptor: lambda.descriptor(),
        cfg,
        tables,
        f,
        classical,
    };
    let results: Vec<Vec<IdentityReport>> = jobs
        .par_iter()
        .map(|&job| ctx.run(job))
        .collect::<Result<_>>()?;
    let mut outcome = VerifyOutcome::default();
    for report in results.into_iter().flatten() {
        if report.identity == IdentityKind::HigherOrderExpansionAltDivisor {
            outcome.findings.push(report);
        } else {
            outcome.reports.push(report);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn sym() -> Lambda<LambdaPoly> {
        Lambda::symbolic()
    }

    #[test]
    fn ode_small_n_passes() {
        let table = CoeffTable::by_recurrence(&sym(), 3);
        for n in 1..=3 {
            let r = verify_ode(&sym(), &table, n, 10).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(
                r.compared,
                Some(ComparedRange {
                    from: -(n as i64 + 1),
                    to: 9
                })
            );
        }
    }

    #[test]
    fn ode_detects_corrupted_entry() {
        let table =
            CoeffTable::by_recurrence(&sym(), 1).with_entry(1, 1, LambdaPoly::from_ints(&[2]));
        let r = verify_ode(&sym(), &table, 1, 8).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness.unwrap().index, -2);
    }

    #[test]
    fn ode_needs_enough_order() {
        let table = CoeffTable::by_recurrence(&sym(), 3);
        assert_eq!(
            verify_ode(&sym(), &table, 3, 4),
            Err(Error::InsufficientOrder { need: 5, have: 4 })
        );
    }

    #[test]
    fn classical_formulas_pass() {
        for n in 1..=4 {
            assert!(
                verify_classical_derivative(n, 10, ClassicalFormula::Reciprocal)
                    .unwrap()
                    .passed()
            );
            assert!(verify_classical_derivative(n, 10, ClassicalFormula::Scaled)
                .unwrap()
                .passed());
        }
    }

    #[test]
    fn expansion_small_cases() {
        let r = verify_expansion(&sym(), 0, 1, ThirdSumDivisor::LPlusI).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = verify_expansion(&sym(), 1, 1, ThirdSumDivisor::LPlusI).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = verify_expansion(&Lambda::at(ratio(1, 2)), 3, 3, ThirdSumDivisor::LPlusI).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn singular_band() {
        for (n, j) in [(2, -1), (3, -2), (3, -1)] {
            assert!(verify_singular(&sym(), j, n).unwrap().passed());
        }
        assert!(verify_singular(&sym(), 0, 3).is_err());
        assert!(verify_singular(&sym(), -1, 1).is_err());
    }

    #[test]
    fn convolution_rows() {
        let table = CoeffTable::by_recurrence(&sym(), 5);
        for n in 1..=5 {
            assert!(verify_convolution(&sym(), &table, n).unwrap().passed());
        }
    }

    #[test]
    fn small_full_run_passes() {
        let cfg = VerifyConfig::sized(Suite::All, LambdaSpec::Symbolic, 3, 4, 2, None);
        let out = verify_all(&cfg).unwrap();
        let failing: Vec<_> = out.reports.iter().filter(|r| !r.passed()).collect();
        assert!(failing.is_empty(), "{failing:#?}");
        assert!(!out.findings.is_empty());

        let cfg = VerifyConfig::sized(Suite::All, LambdaSpec::Value(rat(1)), 3, 4, 2, None);
        assert!(verify_all(&cfg).unwrap().all_passed());
    }

    #[test]
    fn shared_cache_matches_standalone_checks() {
        let cfg = VerifyConfig::sized(Suite::Ode, LambdaSpec::Symbolic, 4, 4, 0, Some(14));
        let shared = verify_all(&cfg).unwrap().reports;
        let table = CoeffTable::by_recurrence(&sym(), 4);
        let alone: Vec<_> = (1..=4)
            .map(|n| verify_ode(&sym(), &table, n, 14).unwrap())
            .collect();
        assert_eq!(shared, alone);

        let cfg = VerifyConfig::sized(
            Suite::ClassicalDerivative,
            LambdaSpec::Symbolic,
            4,
            4,
            0,
            Some(12),
        );
        let shared = verify_all(&cfg).unwrap().reports;
        let alone: Vec<_> = (1..=4)
            .map(|n| verify_classical_derivative(n, 12, ClassicalFormula::Reciprocal).unwrap())
            .collect();
        assert_eq!(shared, alone);
    }

    #[test]
    fn zero_lambda_only_for_classical_suites() {
        let zero = LambdaSpec::Value(rat(0));
        let cfg = VerifyConfig::sized(Suite::Ode, zero.clone(), 3, 3, 2, None);
        assert_eq!(verify_all(&cfg), Err(Error::LambdaZero));
        let cfg = VerifyConfig::sized(Suite::ClassicalDerivative, zero, 3, 3, 2, None);
        assert!(verify_all(&cfg).unwrap().all_passed());
    }
}
