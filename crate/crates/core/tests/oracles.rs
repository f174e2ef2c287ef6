mod common;

use common::{classical_b, degenerate_b_at, degenerate_b_symbolic, q, qq, stirling1, Q};
use degbern::bernoulli::{
    b_explicit_row, b_multinomial_row, b_via_recurrence, b_via_series, classical_b_by_limit,
    classical_b_by_stirling, ExplicitForm,
};
use degbern::combinatorics::{degenerate_stirling2, stirling1_signed, Stirling2Route};
use degbern::{Lambda, LambdaPoly, Rational};

fn poly(coeffs: Vec<Q>) -> LambdaPoly {
    LambdaPoly::new(coeffs)
}

#[test]
fn classical_numbers_match_inversion() {
    let expected = classical_b(15);
    assert_eq!(expected[..4], [q(1), qq(1, 2), qq(-1, 6), qq(1, 4)]);
    assert_eq!(classical_b_by_limit(15), expected);
    assert_eq!(classical_b_by_stirling(15), expected);
}

#[test]
fn fixed_lambda_rows_match_direct_expansion() {
    for lambda in [qq(1, 2), qq(-1, 3), q(2), q(1), qq(7, 5)] {
        let l = Lambda::<Rational>::at(lambda.clone());
        let expected = degenerate_b_at(&lambda, 14);
        assert_eq!(
            b_via_series(&l, 14).unwrap().values,
            expected,
            "λ = {lambda}"
        );
        assert_eq!(
            b_via_recurrence(&l, 14).unwrap().values,
            expected,
            "λ = {lambda}"
        );
        assert_eq!(
            b_multinomial_row(&l, 10).unwrap().values,
            expected[..=10],
            "λ = {lambda}"
        );
        for form in ExplicitForm::ALL {
            assert_eq!(
                b_explicit_row(&l, 10, form).unwrap().values,
                expected[..=10]
            );
        }
    }
}

#[test]
fn symbolic_rows_match_interpolated_oracle() {
    let expected: Vec<LambdaPoly> = degenerate_b_symbolic(10).into_iter().map(poly).collect();
    let sym = Lambda::symbolic();
    assert_eq!(b_via_series(&sym, 10).unwrap().values, expected);
    assert_eq!(b_multinomial_row(&sym, 10).unwrap().values, expected);
    // (1-λ)/2 and (λ²-1)/6.
    assert_eq!(expected[1], poly(vec![qq(1, 2), qq(-1, 2)]));
    assert_eq!(expected[2], poly(vec![qq(-1, 6), q(0), qq(1, 6)]));
}

#[test]
fn first_kind_matches_falling_factorial_expansion() {
    let oracle = stirling1(12);
    let table = stirling1_signed::<Rational>(12);
    for (n, row) in oracle.iter().enumerate() {
        assert_eq!(table.row(n), &row[..], "row {n}");
    }
    assert_eq!(table.row(3), &[q(0), q(2), q(-3), q(1)]);
}

#[test]
fn degenerate_second_kind_small_entries() {
    let t = degenerate_stirling2(&Lambda::symbolic(), 3, Stirling2Route::GeneratingFunction);
    assert_eq!(t.get(2, 1), LambdaPoly::from_ints(&[1, -1]));
    assert_eq!(t.get(2, 2), LambdaPoly::from_ints(&[1]));
    // (1)_{3,λ} = (1-λ)(1-2λ).
    assert_eq!(t.get(3, 1), LambdaPoly::from_ints(&[1, -3, 2]));
}
