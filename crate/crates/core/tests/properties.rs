use degbern::arith::{parse_rational, rational_to_string};
use degbern::bernoulli::{b_higher_order, b_via_multinomial, b_via_series};
use degbern::coeff_a::CoeffTable;
use degbern::combinatorics::{
    bell_partial, bell_scaling_check, binomial, scaled_degenerate_stirling, BellRoute,
};
use degbern::series::{LaurentSeries, TruncatedSeries};
use degbern::{Lambda, LambdaPoly, Rational, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn poly() -> impl Strategy<Value = LambdaPoly> {
    prop::collection::vec(small_rational(), 0..5).prop_map(LambdaPoly::new)
}

fn series(order: usize) -> impl Strategy<Value = TruncatedSeries<Rational>> {
    prop::collection::vec(small_rational(), order).prop_map(TruncatedSeries::new)
}

fn laurent() -> impl Strategy<Value = LaurentSeries<Rational>> {
    (0usize..3, series(8)).prop_map(|(p, s)| LaurentSeries::new(p, s))
}

proptest! {
    #[test]
    fn poly_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, LambdaPoly::zero());
        prop_assert_eq!(&a * &LambdaPoly::one(), a.clone());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(), b in poly(), x in small_rational()) {
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
        prop_assert_eq!((-&a).eval(&x), -a.eval(&x));
    }

    #[test]
    fn reciprocal_inverts(mut s in series(10), c in nonzero_rational()) {
        let mut coeffs = s.coeffs().to_vec();
        coeffs[0] = c;
        s = TruncatedSeries::new(coeffs);
        let product = &s * &s.reciprocal().unwrap();
        prop_assert_eq!(product, TruncatedSeries::one(10));
    }

    #[test]
    fn series_powers_add(s in series(7), a in 0usize..4, b in 0usize..4) {
        prop_assert_eq!(&s.pow(a) * &s.pow(b), s.pow(a + b));
    }

    #[test]
    fn laurent_derivative_obeys_leibniz(f in laurent(), g in laurent()) {
        let lhs = (&f * &g).derivative().unwrap();
        let rhs = &(&f.derivative().unwrap() * &g) + &(&f * &g.derivative().unwrap());
        prop_assert!(lhs.first_difference(&rhs).is_none());
    }

    #[test]
    fn specialization_commutes(x in nonzero_rational(), n in 0usize..9) {
        let sym = Lambda::symbolic();
        let at = Lambda::<Rational>::at(x.clone());
        let s_row = b_via_series(&sym, n).unwrap();
        let r_row = b_via_series(&at, n).unwrap();
        for (p, v) in s_row.values.iter().zip(&r_row.values) {
            prop_assert_eq!(&p.eval(&x), v);
        }
        let s_a = CoeffTable::by_recurrence(&sym, n);
        let r_a = CoeffTable::by_recurrence(&at, n);
        for (sr, rr) in s_a.rows().iter().zip(r_a.rows()) {
            for (p, v) in sr.iter().zip(rr) {
                prop_assert_eq!(&p.eval(&x), v);
            }
        }
        for k in 0..=n {
            prop_assert_eq!(
                scaled_degenerate_stirling(&sym, n, k).eval(&x),
                scaled_degenerate_stirling(&at, n, k)
            );
        }
    }

    #[test]
    fn multinomial_matches_series(x in nonzero_rational(), n in 0usize..10) {
        let at = Lambda::<Rational>::at(x);
        prop_assert_eq!(
            b_via_multinomial(&at, n).unwrap(),
            b_via_series(&at, n).unwrap().values[n].clone()
        );
    }

    #[test]
    fn higher_orders_convolve(x in nonzero_rational(), r in 1usize..4, s in 1usize..4) {
        let at = Lambda::<Rational>::at(x);
        let n_max = 6;
        let br = b_higher_order(&at, r, n_max).unwrap();
        let bs = b_higher_order(&at, s, n_max).unwrap();
        let brs = b_higher_order(&at, r + s, n_max).unwrap();
        for n in 0..=n_max {
            let mut acc = Rational::zero();
            for k in 0..=n {
                acc += binomial(n, k as i64) * br.get(k) * bs.get(n - k);
            }
            prop_assert_eq!(&acc, brs.get(n));
        }
    }

    #[test]
    fn bell_routes_agree(xs in prop::collection::vec(small_rational(), 8), n in 0usize..9, k in 0usize..9) {
        prop_assume!(k <= n);
        prop_assert_eq!(
            bell_partial(n, k, &xs, BellRoute::PartitionSum).unwrap(),
            bell_partial(n, k, &xs, BellRoute::GeneratingFunction).unwrap()
        );
    }

    #[test]
    fn bell_scaling(
        xs in prop::collection::vec(small_rational(), 8),
        a in small_rational(),
        b in small_rational(),
        n in 1usize..9,
        k in 1usize..9,
    ) {
        prop_assume!(k <= n);
        prop_assert!(bell_scaling_check(n, k, &a, &b, &xs).unwrap());
    }

    #[test]
    fn rational_text_round_trips(r in small_rational()) {
        prop_assert_eq!(parse_rational(&rational_to_string(&r)).unwrap(), r);
    }

    #[test]
    fn scalar_json_round_trips(p in poly(), r in small_rational()) {
        for s in [Scalar::Poly(p.clone()), Scalar::Rational(r.clone())] {
            let text = serde_json::to_string(&s).unwrap();
            let back: Scalar = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
