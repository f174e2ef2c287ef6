//! One pass/fail line per acceptance criterion. Every comparison is exact.
//! The process exits nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use degbern::arith::{rat, ratio};
use degbern::bernoulli::{
    b_explicit_row, b_multinomial_row, b_via_recurrence, b_via_series, classical_b_by_limit,
    classical_b_by_stirling, ExplicitForm,
};
use degbern::cli::{run_args, GOLDEN_CASES};
use degbern::coeff_a::CoeffTable;
use degbern::combinatorics::{
    bell_partial, bell_scaling_check, factorial_rat, scaled_degenerate_stirling, stirling1_signed,
    BellRoute, StirlingTable,
};
use degbern::verify::{
    verify_all, verify_all_with, verify_expansion, Suite, ThirdSumDivisor, Verdict, VerifyConfig,
    VerifyOutcome, VerifyTables,
};
use degbern::{Coeff, Lambda, LambdaPoly, LambdaSpec, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn outcome_summary(out: &VerifyOutcome) -> Check {
    match out.reports.iter().find(|r| r.verdict == Verdict::Fail) {
        Some(r) => Err(format!(
            "{:?} failed at {:?}: {:?}",
            r.identity, r.params, r.witness
        )),
        None => Ok(format!("{} reports", out.reports.len())),
    }
}

fn run_suite(cfg: VerifyConfig) -> Check {
    outcome_summary(&verify_all(&cfg).map_err(|e| e.to_string())?)
}

fn a_triangle_rows() -> Check {
    let table = CoeffTable::by_recurrence(&Lambda::symbolic(), 3);
    let expected: [&[&str]; 3] = [
        &["λ", "1"],
        &["λ+λ^2", "1+3λ", "2"],
        &["2λ+3λ^2+λ^3", "2+9λ+7λ^2", "6+12λ", "6"],
    ];
    for (big_n, want) in expected.iter().enumerate().map(|(k, w)| (k + 1, w)) {
        let got: Vec<String> = table.row(big_n).iter().map(|p| p.to_string()).collect();
        ensure(got == *want, || format!("row {big_n}: {got:?}"))?;
    }
    Ok("rows 1..3".into())
}

fn a_route_agreement() -> Check {
    let sym = Lambda::symbolic();
    let rec = CoeffTable::by_recurrence(&sym, 14);
    let unrolled = CoeffTable::by_unrolled_recurrence(&sym, 14);
    let falling = CoeffTable::by_falling_form(&sym, 14).map_err(|e| e.to_string())?;
    let stirling = CoeffTable::by_stirling_form(&sym, 14);
    for (name, t) in [
        ("unrolled", &unrolled),
        ("falling", &falling),
        ("stirling", &stirling),
    ] {
        for big_n in 0..=14 {
            ensure(t.row(big_n) == rec.row(big_n), || {
                format!("{name} differs at N = {big_n}")
            })?;
        }
    }
    Ok("0 ≤ i ≤ N ≤ 14".into())
}

fn b_rows_agree<C: Coeff>(lambda: &Lambda<C>, n_max: usize) -> Result<(), String> {
    let label = lambda.descriptor();
    let series = b_via_series(lambda, n_max).map_err(|e| e.to_string())?;
    let recurrence = b_via_recurrence(lambda, n_max).map_err(|e| e.to_string())?;
    let multinomial = b_multinomial_row(lambda, n_max).map_err(|e| e.to_string())?;
    ensure(recurrence.values == series.values, || {
        format!("recurrence differs at λ = {label}")
    })?;
    ensure(multinomial.values == series.values, || {
        format!("multinomial differs at λ = {label}")
    })?;
    for form in ExplicitForm::ALL {
        let row = b_explicit_row(lambda, n_max, form).map_err(|e| e.to_string())?;
        ensure(row.values == series.values, || {
            format!("{form:?} differs at λ = {label}")
        })?;
    }
    Ok(())
}

fn b_route_agreement() -> Check {
    b_rows_agree(&Lambda::symbolic(), 12)?;
    for x in [ratio(1, 2), ratio(-1, 3), rat(2)] {
        b_rows_agree(&Lambda::<Rational>::at(x), 22)?;
    }
    Ok("n ≤ 12 symbolic, n ≤ 22 at 1/2, -1/3, 2".into())
}

fn limits() -> Check {
    let sym = Lambda::symbolic();
    let s1 = stirling1_signed::<Rational>(12);
    let a = CoeffTable::by_recurrence(&sym, 12);
    for big_n in 0..=12 {
        for k in 0..=big_n {
            let at_zero = scaled_degenerate_stirling(&sym, big_n, k).eval(&Rational::zero());
            ensure(at_zero == s1.get(big_n, k), || {
                format!("scaled Stirling ({big_n},{k})")
            })?;
            let mut want = factorial_rat(k) * s1.get(big_n, k);
            if (big_n + k) % 2 == 1 {
                want = -want;
            }
            ensure(a.get(k, big_n).eval(&Rational::zero()) == want, || {
                format!("a_{k}({big_n}) constant term")
            })?;
        }
    }
    let oracle = common::classical_b(15);
    ensure(classical_b_by_limit(15) == oracle, || "limit route".into())?;
    ensure(classical_b_by_stirling(15) == oracle, || {
        "Stirling formula".into()
    })?;
    ensure(oracle[..3] == [rat(1), ratio(1, 2), ratio(-1, 6)], || {
        "b_0..b_2".into()
    })?;
    Ok("N ≤ 12, classical n ≤ 15".into())
}

/// Logs how the `(l+1)!` reading of the third sum compares on the full grid.
fn printed_variant_note() -> String {
    let sym = Lambda::symbolic();
    let (mut pass, mut total) = (0, 0);
    for big_n in 1..=5 {
        for j in 0..=8 {
            total += 1;
            if verify_expansion(&sym, j, big_n, ThirdSumDivisor::LPlusOne).is_ok_and(|r| r.passed())
            {
                pass += 1;
            }
        }
    }
    format!("(l+1)! reading matches {pass} of {total} cases")
}

fn expansion_and_singular() -> Check {
    let expansion = VerifyConfig::sized(
        Suite::HigherOrderExpansion,
        LambdaSpec::Symbolic,
        5,
        5,
        8,
        None,
    );
    let singular = VerifyConfig::sized(Suite::SingularPart, LambdaSpec::Symbolic, 8, 8, 0, None);
    let a = run_suite(expansion)?;
    let b = run_suite(singular)?;
    Ok(format!(
        "expansion {a}, singular part {b}; {}",
        printed_variant_note()
    ))
}

fn bell_and_faults() -> Check {
    let xs: Vec<Rational> = (0..12).map(|i| ratio(2 * i - 7, (i % 4) + 1)).collect();
    for n in 0..=12 {
        for k in 0..=n {
            let p = bell_partial(n, k, &xs, BellRoute::PartitionSum).map_err(|e| e.to_string())?;
            let g = bell_partial(n, k, &xs, BellRoute::GeneratingFunction)
                .map_err(|e| e.to_string())?;
            ensure(p == g, || format!("Bell routes differ at ({n},{k})"))?;
        }
    }

    let small =
        (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)));
    let instance = (
        prop::collection::vec(small.clone(), 8),
        small.clone(),
        small,
        1usize..9,
        1usize..9,
    )
        .prop_filter("k ≤ n", |(_, _, _, n, k)| k <= n);
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 100,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    runner
        .run(&instance, |(xs, a, b, n, k)| {
            prop_assert!(bell_scaling_check(n, k, &a, &b, &xs).unwrap());
            Ok(())
        })
        .map_err(|e| format!("scaling identity: {e}"))?;

    let injected = fault_injection()?;
    Ok(format!(
        "Bell n ≤ 12, scaling 100 cases, {injected} corruptions all detected"
    ))
}

fn fault_injection() -> Result<usize, String> {
    let cfg = VerifyConfig::sized(Suite::All, LambdaSpec::Symbolic, 3, 4, 2, None);
    let lambda = Lambda::symbolic();
    let clean = VerifyTables::build(&lambda, &cfg).map_err(|e| e.to_string())?;
    let fails = |t: &VerifyTables<LambdaPoly>| -> Result<bool, String> {
        let out = verify_all_with(&lambda, &cfg, t).map_err(|e| e.to_string())?;
        Ok(!out.all_passed())
    };
    ensure(!fails(&clean)?, || "clean tables fail".into())?;
    let mut count = 0;
    for big_n in 1..=clean.a.n_max() {
        for i in 0..=big_n {
            let mut t = clean.clone();
            let v = t.a.get(i, big_n).clone() + LambdaPoly::one();
            t.a = t.a.with_entry(i, big_n, v);
            ensure(fails(&t)?, || {
                format!("a_{i}({big_n}) corruption unnoticed")
            })?;
            count += 1;
        }
    }
    for r in 1..=clean.b_rows.len() {
        for idx in 0..=(cfg.max_j + r).min(clean.b_rows[r - 1].n_max()) {
            let mut t = clean.clone();
            t.b_rows[r - 1].values[idx] += &LambdaPoly::one();
            ensure(fails(&t)?, || format!("b^({r})_{idx} corruption unnoticed"))?;
            count += 1;
        }
    }
    for n in 1..=clean.s1.n_max() {
        for k in 0..=n {
            let mut rows = clean.s1.rows().to_vec();
            rows[n][k] += Rational::one();
            let mut t = clean.clone();
            t.s1 = StirlingTable::from_rows(clean.s1.kind(), rows).map_err(|e| e.to_string())?;
            ensure(fails(&t)?, || format!("s({n},{k}) corruption unnoticed"))?;
            count += 1;
        }
    }
    Ok(count)
}

fn determinism() -> Check {
    let extra: [&[&str]; 6] = [
        &["verify", "--suite", "all"],
        &["verify", "--suite", "cor34", "--max-N", "6"],
        &["verify", "--suite", "eq41", "--max-N", "5"],
        &[
            "verify", "--suite", "eq42", "--max-N", "5", "--format", "csv",
        ],
        &[
            "verify", "--suite", "all", "--lambda", "-1/3", "--max-N", "4", "--format", "latex",
        ],
        &["b", "--max-n", "12", "--lambda", "2", "--route", "all"],
    ];
    let cases = GOLDEN_CASES.iter().map(|(_, a)| *a).chain(extra);
    let mut count = 0;
    for args in cases {
        let mut outputs = Vec::new();
        for threads in ["1", "1", "4", "4"] {
            let mut full = vec!["degbern", "--threads", threads];
            full.extend_from_slice(args);
            outputs.push(run_args(full).map_err(|e| e.to_string())?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{args:?} varies")
        })?;
        count += 1;
    }
    Ok(format!("{count} commands, 2 runs each at 1 and 4 threads"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("a-coefficient rows 1..3", a_triangle_rows),
        ("four a-coefficient routes", a_route_agreement),
        ("ODE family, N ≤ 10, order 30", || {
            run_suite(VerifyConfig::sized(
                Suite::Ode,
                LambdaSpec::Symbolic,
                10,
                10,
                0,
                Some(30),
            ))
        }),
        ("b routes", b_route_agreement),
        ("λ → 0 limits", limits),
        ("convolution identity, n ≤ 12", || {
            run_suite(VerifyConfig::sized(
                Suite::Convolution,
                LambdaSpec::Symbolic,
                12,
                12,
                0,
                None,
            ))
        }),
        ("classical derivative formulas, N ≤ 10, order 30", || {
            let a = run_suite(VerifyConfig::sized(
                Suite::ClassicalDerivative,
                LambdaSpec::Symbolic,
                10,
                10,
                0,
                Some(30),
            ))?;
            let b = run_suite(VerifyConfig::sized(
                Suite::ClassicalScaledDerivative,
                LambdaSpec::Symbolic,
                10,
                10,
                0,
                Some(30),
            ))?;
            Ok(format!("{a} + {b}"))
        }),
        (
            "higher-order expansion and singular part",
            expansion_and_singular,
        ),
        ("property suites and fault injection", bell_and_faults),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({detail}) [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
