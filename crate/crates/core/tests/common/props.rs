//! Randomized algebra identities, runnable with an explicit case budget.

use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use omega_core::diffop::{conjugate, op_mul, DiffOp, Mono};
use omega_core::ratfield::{rf_integrate, Poly, RatFunc, Var};

pub fn small_poly(max_deg: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0..=max_deg), (0..=max_deg), -3i64..=3), 0..4).prop_map(move |ts| {
        Poly::from_terms(
            ts.into_iter()
                .filter(|(i, j, _)| i + j <= max_deg)
                .map(|(i, j, c)| ((i, j), BigRational::from_integer(c.into()))),
        )
    })
}

pub fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (small_poly(2), small_poly(1).prop_filter("nonzero", |p| !p.is_zero()))
        .prop_map(|(n, d)| RatFunc::new(n, d).expect("nonzero denominator"))
}

pub fn nonzero_ratfunc() -> impl Strategy<Value = RatFunc> {
    ratfunc().prop_filter("nonzero", |r| !r.is_zero())
}

/// Operators of order at most two with polynomial coefficients.
pub fn diffop() -> impl Strategy<Value = DiffOp> {
    prop::collection::vec(((0u32..=2), (0u32..=2), small_poly(1)), 1..4)
        .prop_map(|ts| {
            DiffOp::from_terms(
                ts.into_iter()
                    .filter(|(i, j, _)| i + j <= 2)
                    .map(|(i, j, c)| (Mono::new(i, j), RatFunc::from_poly(c))),
            )
        })
        .prop_filter("nonzero", |a| !a.is_zero())
}

/// Nonzero operators of order at most two with integer coefficients.
pub fn const_diffop() -> impl Strategy<Value = DiffOp> {
    prop::collection::vec(((0u32..=2), (0u32..=2), -3i64..=3), 1..4)
        .prop_map(|ts| {
            DiffOp::from_terms(
                ts.into_iter()
                    .filter(|(i, j, _)| i + j <= 2)
                    .map(|(i, j, c)| (Mono::new(i, j), RatFunc::from(c))),
            )
        })
        .prop_filter("nonzero", |a| !a.is_zero())
}

fn runner(cases: u32) -> TestRunner {
    let cfg = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check(ok: bool, what: &str) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

pub fn field_axioms(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(ratfunc(), ratfunc(), nonzero_ratfunc()), |(a, b, c)| {
            check(&(&a + &b) + &c == &a + &(&b + &c), "additive associativity")?;
            check(&a * &b == &b * &a, "commutativity")?;
            check(&c * &(&a + &b) == &(&c * &a) + &(&c * &b), "distributivity")?;
            check((&c * &c.inv().unwrap()).is_one(), "inverse")?;
            check((&a + &(-&a)).is_zero(), "additive inverse")?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn leibniz(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(ratfunc(), ratfunc(), diffop()), |(f, g, a)| {
            for v in [Var::X, Var::Y] {
                let lhs = (&f * &g).derive(v);
                let rhs = &(&f.derive(v) * &g) + &(&f * &g.derive(v));
                check(lhs == rhs, "product rule")?;
            }
            // ∂x ∘ f = f ∂x + f_x as operators.
            let lhs = op_mul(&DiffOp::dx(), &DiffOp::from_fn(f.clone()));
            let rhs = DiffOp::term(f.clone(), 1, 0).add(&DiffOp::from_fn(f.derive(Var::X)));
            check(lhs == rhs, "operator Leibniz rule")?;
            // Composition agrees with successive application.
            let fa = DiffOp::from_fn(f.clone());
            check(op_mul(&a, &fa).apply(&g) == a.apply(&(&f * &g)), "application")?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn associativity(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(diffop(), diffop(), diffop()), |(a, b, c)| {
            check(
                op_mul(&op_mul(&a, &b), &c) == op_mul(&a, &op_mul(&b, &c)),
                "associativity",
            )
        })
        .map_err(|e| e.to_string())
}

pub fn symbol_multiplicativity(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(diffop(), diffop()), |(a, b)| {
            let ab = op_mul(&a, &b);
            check(
                ab.principal_symbol() == a.principal_symbol().mul(&b.principal_symbol()),
                "symbol of a product",
            )
        })
        .map_err(|e| e.to_string())
}

pub fn conjugation(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(diffop(), diffop(), nonzero_ratfunc()), |(a, b, s)| {
            let lhs = conjugate(&op_mul(&a, &b), &s).unwrap();
            let rhs = op_mul(&conjugate(&a, &s).unwrap(), &conjugate(&b, &s).unwrap());
            check(lhs == rhs, "conjugation is multiplicative")
        })
        .map_err(|e| e.to_string())
}

pub fn integrate_round_trip(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(ratfunc(), prop::bool::ANY), |(a, in_x)| {
            let v = if in_x { Var::X } else { Var::Y };
            check(
                rf_integrate(&a, v).derivative() == a,
                "derivative of the antiderivative",
            )?;
            let back = rf_integrate(&a.derive(v), v);
            check(
                back.is_closed() && back.log_terms.is_empty(),
                "derivatives integrate rationally",
            )?;
            check(!(&back.rational_part - &a).depends_on(v), "up to a constant")
        })
        .map_err(|e| e.to_string())
}

/// The six identities with their case budgets; 10 000 cases in total.
pub fn algebra_suite() -> Vec<(&'static str, u32, Result<(), String>)> {
    type Check = fn(u32) -> Result<(), String>;
    let plan: [(&'static str, u32, Check); 6] = [
        ("field axioms", 2500, field_axioms),
        ("Leibniz", 1500, leibniz),
        ("associativity", 1500, associativity),
        ("symbol multiplicativity", 1500, symbol_multiplicativity),
        ("conjugation homomorphism", 1500, conjugation),
        ("integrate/derive round trip", 1500, integrate_round_trip),
    ];
    plan.iter().map(|(n, c, f)| (*n, *c, f(*c))).collect()
}
