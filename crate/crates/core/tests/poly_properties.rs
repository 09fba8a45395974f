//! Property tests for the exact polynomial layer: ring axioms,
//! substitution as a homomorphism, and the order/initial-form calculus.

use hardy_forge_core::poly::{multi_indices, Polynomial, RationalPoint};
use hardy_forge_core::scalar::Rat;
use num_traits::Zero;
use proptest::prelude::*;

/// Random small polynomial: up to 6 terms, exponents <= 3, coefficients in
/// [-9, 9] with denominators in [1, 4].
fn arb_poly(nvars: usize) -> impl Strategy<Value = Polynomial> {
    let term = (
        prop::collection::vec(0u32..4, nvars),
        -9i64..10,
        1i64..5,
    );
    prop::collection::vec(term, 0..6).prop_map(move |terms| {
        Polynomial::from_terms(
            nvars,
            terms
                .into_iter()
                .map(|(exp, num, den)| (exp, Rat::new(num.into(), den.into())))
                .collect(),
        )
    })
}

fn arb_point(nvars: usize) -> impl Strategy<Value = RationalPoint> {
    prop::collection::vec((-4i64..5, 1i64..4), nvars)
        .prop_map(|cs| RationalPoint(cs.into_iter().map(|(n, d)| Rat::new(n.into(), d.into())).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn add_sub_roundtrip(p in arb_poly(3), q in arb_poly(3)) {
        let sum = &p + &q;
        prop_assert_eq!(&sum - &q, p);
    }

    #[test]
    fn multiplication_is_commutative_and_associative(
        p in arb_poly(2), q in arb_poly(2), s in arb_poly(2)
    ) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &s, &p * &(&q * &s));
    }

    #[test]
    fn distributivity(p in arb_poly(2), q in arb_poly(2), s in arb_poly(2)) {
        let lhs = &p * &(&q + &s);
        let rhs = &(&p * &q) + &(&p * &s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(
        p in arb_poly(2), q in arb_poly(2), a in arb_poly(2), b in arb_poly(2)
    ) {
        let images = [a, b];
        let lhs = (&p * &q).substitute(&images).unwrap();
        let rhs = &p.substitute(&images).unwrap() * &q.substitute(&images).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_respects_ring_ops(p in arb_poly(3), q in arb_poly(3), x in arb_point(3)) {
        let sum = (&p + &q).eval_rat(&x).unwrap();
        prop_assert_eq!(sum, p.eval_rat(&x).unwrap() + q.eval_rat(&x).unwrap());
        let prod = (&p * &q).eval_rat(&x).unwrap();
        prop_assert_eq!(prod, p.eval_rat(&x).unwrap() * q.eval_rat(&x).unwrap());
    }

    #[test]
    fn order_equals_degree_of_initial_form(p in arb_poly(2), a in arb_point(2)) {
        prop_assume!(!p.is_zero());
        let ord = p.order_at(&a).unwrap();
        let init = p.initial_form(&a).unwrap();
        prop_assert!(init.is_homogeneous());
        prop_assert_eq!(init.degree().unwrap(), ord);
    }

    #[test]
    fn euler_identity_for_homogenized_inputs(p in arb_poly(2)) {
        // Restrict to the top homogeneous part.
        prop_assume!(!p.is_zero());
        let d = p.degree().unwrap();
        let top = Polynomial::from_terms(
            2,
            p.terms()
                .filter(|(e, _)| e.total_degree() == d)
                .map(|(e, c)| (e.0.clone(), c.clone()))
                .collect(),
        );
        let lhs = top.euler_apply();
        let rhs = top.scale(&Rat::from_integer(d.into()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn squared_partials_vanish_below_the_order(p in arb_poly(2), a in arb_point(2)) {
        prop_assume!(!p.is_zero());
        let ord = p.order_at(&a).unwrap();
        for k in 0..ord {
            let pk = p.sum_sq_partials(k);
            prop_assert!(pk.eval_rat(&a).unwrap().is_zero(), "P^{k} nonzero below order {ord}");
        }
        let pord = p.sum_sq_partials(ord);
        prop_assert!(!pord.eval_rat(&a).unwrap().is_zero());
    }

    #[test]
    fn parse_format_roundtrip(p in arb_poly(3)) {
        let text = p.to_text();
        let back = hardy_forge_core::poly::parse(&text, 3).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn multi_index_counts_are_binomial() {
    // Number of multi-indices of order k in n variables is C(n+k-1, k).
    assert_eq!(multi_indices(2, 3).len(), 4);
    assert_eq!(multi_indices(3, 2).len(), 6);
    assert_eq!(multi_indices(1, 5).len(), 1);
    assert_eq!(multi_indices(3, 0).len(), 1);
}
