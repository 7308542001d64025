mod common;

use common::props;
use proptest::prelude::*;

use omega_core::diffop::DiffOp;
use omega_core::formal::{complete, PDESystem};
use omega_core::parse::parse_operator;

#[test]
fn field_axioms() {
    props::field_axioms(500).unwrap();
}

#[test]
fn leibniz_rule() {
    props::leibniz(300).unwrap();
}

#[test]
fn composition_is_associative() {
    props::associativity(300).unwrap();
}

#[test]
fn symbol_is_multiplicative() {
    props::symbol_multiplicativity(300).unwrap();
}

#[test]
fn conjugation_is_a_homomorphism() {
    props::conjugation(300).unwrap();
}

#[test]
fn integration_inverts_derivation() {
    props::integrate_round_trip(300).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn operators_print_and_parse_back(a in props::diffop()) {
        prop_assert_eq!(parse_operator(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn completion_is_idempotent_and_contains_inputs(a in props::const_diffop(), b in props::const_diffop()) {
        let sys = PDESystem::new(vec![a.clone(), b.clone()]).unwrap();
        let ci = complete(&sys);
        if !ci.trivial {
            for g in [&a, &b] {
                prop_assert!(ci.contains(g));
            }
            let again = complete(&ci.to_system());
            prop_assert_eq!(again.basis, ci.basis.clone());
        }
    }

    #[test]
    fn multiples_reduce_to_zero(a in props::const_diffop(), b in props::const_diffop(), m in props::diffop()) {
        let ci = complete(&PDESystem::new(vec![a.clone(), b]).unwrap());
        prop_assert!(ci.contains(&m.mul(&a)));
    }
}

#[test]
fn printed_identity_parses() {
    assert_eq!(parse_operator("1").unwrap(), DiffOp::one());
}
