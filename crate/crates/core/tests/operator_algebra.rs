//! Algebraic laws of differential operators and symbol-fiber finiteness.

mod common;

use proptest::prelude::*;
use toric_gkz::corpus;
use toric_gkz::linalg::Rat;
use toric_gkz::operators::{symbol_fiber_dimension, symbol_order, DiffOp, VarKind};

const KINDS: [VarKind; 2] = [VarKind::Log, VarKind::Plain];

/// `c · χ^β z^k D^s E^u` built from the elementary operators.
fn term(c: i64, beta: [u32; 2], k: u32, s: [u32; 2], u: u32) -> DiffOp {
    DiffOp::chi_monomial(&KINDS, &beta)
        .mul(&DiffOp::z_power(&KINDS, k))
        .mul(&DiffOp::letter(&KINDS, 0).pow(s[0]))
        .mul(&DiffOp::letter(&KINDS, 1).pow(s[1]))
        .mul(&DiffOp::euler(&KINDS).pow(u))
        .scale(&Rat::from_integer(c.into()))
}

fn arb_op() -> impl Strategy<Value = DiffOp> {
    let t = (-3i64..=3, [0u32..3, 0..3], 0u32..2, [0u32..3, 0..3], 0u32..2)
        .prop_map(|(c, b, k, s, u)| term(c, b, k, s, u));
    prop::collection::vec(t, 1..4).prop_map(|ts| ts.iter().fold(DiffOp::zero(&KINDS), |acc, t| acc.add(t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative(a in arb_op(), b in arb_op(), c in arb_op()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn multiplication_distributes(a in arb_op(), b in arb_op(), c in arb_op()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(b.add(&c).mul(&a), b.mul(&a).add(&c.mul(&a)));
    }

    #[test]
    fn principal_symbol_is_multiplicative(a in arb_op(), b in arb_op()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let order = symbol_order(KINDS.len());
        let product = a.principal_symbol().mul(&b.principal_symbol(), &order);
        prop_assert_eq!(a.mul(&b).principal_symbol(), product);
        prop_assert_eq!(a.mul(&b).order(), a.order() + b.order());
    }
}

#[test]
fn symbol_fiber_is_finite_and_sensitive() {
    for (name, f) in corpus::named() {
        let (pm, coh) = common::model(f);
        let fiber = symbol_fiber_dimension(&pm, &coh).unwrap();
        let dim = fiber.dimension.unwrap_or_else(|| panic!("{name}: infinite fiber"));
        let boxes = fiber.sensitivity.iter().find(|s| s.family == "box").unwrap();
        assert!(!boxes.empty, "{name}");
        assert!(boxes.dimension_without.is_none_or(|d| d > dim), "{name}");
    }
}
