use proptest::prelude::*;
use twophoton::opalg::{rat, Axis, Bindings, Coefficient, Coord, LinearForm, OperatorExpr, PositionFactor};

fn coord(a: u8) -> Coord {
    Coord::new(0, if a == 0 { Axis::X } else { Axis::Y })
}

fn primitive() -> impl Strategy<Value = OperatorExpr> {
    prop_oneof![
        (0u8..2).prop_map(|a| OperatorExpr::coordinate(coord(a))),
        (0u8..2).prop_map(|a| OperatorExpr::momentum(coord(a))),
        (0u8..2, -3i64..=3, 1i64..=3)
            .prop_filter("non-zero rate", |(_, n, _)| *n != 0)
            .prop_map(|(a, n, d)| OperatorExpr::position(PositionFactor::exp(LinearForm::coord(coord(a)), rat(n, d)))),
        (0u8..2).prop_map(|a| OperatorExpr::position(PositionFactor::func("U", LinearForm::coord(coord(a))))),
    ]
}

fn coefficient() -> impl Strategy<Value = Coefficient> {
    prop_oneof![
        (-4i64..=4).prop_map(Coefficient::int),
        Just(Coefficient::i()),
        Just(Coefficient::param("k")),
    ]
}

/// Sums of up to three scaled words of up to three primitives.
fn expr() -> impl Strategy<Value = OperatorExpr> {
    prop::collection::vec((coefficient(), prop::collection::vec(primitive(), 1..=3)), 1..=3).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(c, word)| word.iter().skip(1).fold(word[0].clone(), |acc, w| &acc * w).scale(&c))
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonicalization_is_idempotent(a in expr()) {
        let once = a.canonicalize();
        prop_assert!(once.canonicalize().equal(&once));
        prop_assert!(once.is_canonical());
    }

    #[test]
    fn commutator_is_antisymmetric(a in expr(), b in expr()) {
        prop_assert!((&a.commutator(&b) + &b.commutator(&a)).is_zero());
    }

    #[test]
    fn commutator_obeys_leibniz(a in expr(), b in expr(), c in expr()) {
        let lhs = a.commutator(&(&b * &c));
        let rhs = &(&a.commutator(&b) * &c) + &(&b * &a.commutator(&c));
        prop_assert!(lhs.equal(&rhs));
    }

    #[test]
    fn jacobi_identity(a in expr(), b in expr(), c in expr()) {
        let j = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a))) + &c.commutator(&a.commutator(&b));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn products_associate_and_distribute(a in expr(), b in expr(), c in expr()) {
        prop_assert!((&(&a * &b) * &c).equal(&(&a * &(&b * &c))));
        prop_assert!((&a * &(&b + &c)).equal(&(&(&a * &b) + &(&a * &c))));
    }

    #[test]
    fn adjoint_reverses_products(a in expr(), b in expr()) {
        prop_assert!(a.adjoint().adjoint().equal(&a));
        prop_assert!((&a * &b).adjoint().equal(&(&b.adjoint() * &a.adjoint())));
    }

    #[test]
    fn binding_commutes_with_products(a in expr(), b in expr(), k in -5i64..=5) {
        let bind: Bindings = [("k".to_string(), rat(k, 2))].into_iter().collect();
        let lhs = (&a * &b).substitute_parameters(&bind).unwrap();
        let rhs = &a.substitute_parameters(&bind).unwrap() * &b.substitute_parameters(&bind).unwrap();
        prop_assert!(lhs.equal(&rhs));
    }
}
