//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use omega_core::classical::{darboux_status, invariant_h0, invariant_k0, invariant_sequence, DarbouxStatus};
use omega_core::classical::{HyperbolicE2, Truncation};
use omega_core::diffop::{conjugate, Frame};
use omega_core::formal::{complete, spencer_numbers, symbol_profile, PDESystem};
use omega_core::laplace::{integrate_full, Integration, InverseKind};
use omega_core::parse::{parse, parse_operator};
use omega_core::ratfield::RatFunc;
use omega_core::zoo::{complexity_bound, enumerate_types, kappa_range, type_count, TypeSig};

use common::law::{complexity_law, inverse_contracts};
use common::oracle::{compare, CASES};
use common::props::algebra_suite;

type Outcome = Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn load(name: &str) -> PDESystem {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    PDESystem::new(parse(&text).unwrap().equations).unwrap()
}

fn solve_timed(name: &str) -> Result<(Integration, Duration), String> {
    let t = Instant::now();
    let r = integrate_full(&load(name)).map_err(|e| e.to_string())?;
    Ok((r, t.elapsed()))
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        fail(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn golden(name: &str, expression: &str, constants: usize, limit: Duration) -> Result<(Integration, String), String> {
    let (r, dt) = solve_timed(name)?;
    expect_eq("solution", r.solution.render("f").as_str(), expression)?;
    expect_eq("verified", r.verified, Some(true))?;
    expect_eq("constants", r.solution.num_constants(), constants)?;
    if dt > limit {
        return fail(format!("took {dt:?}"));
    }
    Ok((r, format!("{dt:.2?}")))
}

fn example_one() -> Outcome {
    let expr = "9*y^3*f'''(y) + 27*x*y^2*f''(y) + 36*x^2*y*f'(y) + 16*x^3*f(y)";
    let (r, dt) = golden("example1.pde", expr, 0, Duration::from_secs(5))?;
    expect_eq("q", r.solution.q(), Some(3))?;
    Ok(format!("u = {expr}, verified, {dt}"))
}

fn example_two() -> Outcome {
    let expr = "x^3*f''(y) - 6*x^2*f'(y) + 6*x*f(y) + y*C1";
    let (r, dt) = golden("example2.pde", expr, 1, Duration::from_secs(5))?;
    let route: Vec<String> = r.trace.iter().map(|e| e.from.to_string()).collect();
    expect_eq("route", route, vec!["3E3".into(), "E2+E3".into(), "2E2".into()])?;
    expect_eq("terminal", r.terminal.describe().as_str(), "Frobenius(ω=0)")?;
    let labels: Vec<&str> = r.trace.iter().skip(1).map(|e| e.branch.as_str()).collect();
    if !labels[0].starts_with("Υ23^2") || labels[1] != "Υ22^b" {
        return fail(format!("branch labels {labels:?}, expected Υ23^2… then Υ22^b"));
    }
    Ok(format!("u = {expr}, route 3E3 → E2+E3 → 2E2 → ω=0, {dt}"))
}

fn example_three() -> Outcome {
    let expr = "-y*f'(y) + (x + 1)*f(y) + C1";
    let (r, dt) = golden("example3.pde", expr, 1, Duration::from_secs(5))?;
    expect_eq("first inverse", r.steps[0].kind, InverseKind::Frobenius)?;
    Ok(format!("u = {expr}, first inverse frobenius, {dt}"))
}

fn zoo_table() -> Outcome {
    let t = Instant::now();
    let counts: Vec<usize> = (1..=10).map(type_count).collect();
    let names = |n| {
        enumerate_types(n)
            .into_iter()
            .map(|e| e.sig.to_string())
            .collect::<Vec<_>>()
    };
    let k4 = names(4);
    let k6 = names(6);
    let dt = t.elapsed();
    expect_eq("κ=4 types", k4, vec!["E2+E5".into(), "2E3".into(), "2E3+E4".into()])?;
    expect_eq(
        "κ=6 types",
        k6,
        ["E2+E7", "2E3+E6", "E3+E4", "E3+E4+E5", "4E4"]
            .map(String::from)
            .to_vec(),
    )?;
    expect_eq("R(1..10)", counts, vec![1, 1, 2, 3, 3, 5, 6, 9, 11, 13])?;
    if dt > Duration::from_secs(60) {
        return fail(format!("took {dt:?}"));
    }
    Ok(format!("R(1..10) and the κ=4, κ=6 lists, {dt:.2?}"))
}

fn complexity_law_on_corpus(corpus: &[common::Member]) -> Outcome {
    if corpus.len() < 20 {
        return fail(format!("corpus has {} members", corpus.len()));
    }
    let s = complexity_law(corpus)?;
    for c in ["Υ22", "Υ23^1", "Υ23^2", "Υ333", "Υ33^1", "Υ33^2"] {
        if !s.classes.contains(c) {
            return fail(format!("no member of class {c}"));
        }
    }
    Ok(format!(
        "{} members, {} steps, {} generic steps lower κ by 1",
        s.members, s.steps, s.generic_steps
    ))
}

fn inverse_contracts_on_corpus(corpus: &[common::Member]) -> Outcome {
    let n = inverse_contracts(corpus)?;
    if n == 0 {
        return fail("no differential steps");
    }
    Ok(format!("{n} differential steps"))
}

/// `Y^j X^{k-j}` for `j < k` in the given frame.
fn kek(k: u32, frame: &Frame) -> Vec<omega_core::diffop::DiffOp> {
    (0..k).map(|j| frame.word(j, k - j)).collect()
}

fn kek_complexity() -> Outcome {
    let x = RatFunc::from_poly(omega_core::ratfield::Poly::x());
    let y = RatFunc::from_poly(omega_core::ratfield::Poly::y());
    // X = ∂x + y and Y = ∂y + x commute.
    let shifted = Frame::new(y.clone(), x.clone());
    let sigma = &RatFunc::one() + &(&x * &x);
    for k in 2..=5u32 {
        let want = (k * (k - 1) / 2) as usize;
        let plain = kek(k, &Frame::plain());
        let conj: Vec<_> = kek(k, &shifted).iter().map(|g| conjugate(g, &sigma).unwrap()).collect();
        for (what, gens) in [("monomial", plain), ("conjugated", conj)] {
            let ci = complete(&PDESystem::new(gens).unwrap());
            let p = symbol_profile(&ci).map_err(|e| e.to_string())?;
            let t = spencer_numbers(&ci).map_err(|e| e.to_string())?.type_sig;
            expect_eq(
                &format!("{what} {k}E{k} type"),
                t.clone(),
                TypeSig::new(vec![k; k as usize]),
            )?;
            expect_eq(&format!("{what} {k}E{k} κ"), p.kappa, want)?;
            let b = complexity_bound(&t);
            expect_eq(
                &format!("{k}E{k} bound"),
                (b.value, b.equality, b.exact),
                (want as i64, true, Some(want as u32)),
            )?;
        }
    }
    let mut checked = 0;
    for n in 1..=6u32 {
        for e in enumerate_types(n) {
            let b = complexity_bound(&e.sig);
            if n as i64 > b.value {
                return fail(format!("{} at κ={n} exceeds its bound {}", e.sig, b.value));
            }
            if b.equality && n as i64 != b.value {
                return fail(format!("{} is a boundary case but κ={n} < {}", e.sig, b.value));
            }
            if let Some(x) = b.exact {
                expect_eq(&format!("{} exact κ", e.sig), x, n)?;
            }
            if b.equality {
                expect_eq(&format!("{} κ range", e.sig), kappa_range(&e.sig), Some((n, n)))?;
            }
            checked += 1;
        }
    }
    Ok(format!(
        "κ(kE_k) = k(k−1)/2 for k = 2..5, bound on {checked} types with κ ≤ 6"
    ))
}

fn classical_chain() -> Outcome {
    let eq = |s: &str| HyperbolicE2::from_op(&parse_operator(s).unwrap()).map_err(|e| e.to_string());
    let limit = Duration::from_secs(1);
    let t = Instant::now();
    let kg = eq("Dx*Dy - 1")?;
    let one = RatFunc::one();
    expect_eq(
        "(k0, h0)",
        (invariant_k0(&kg), invariant_h0(&kg)),
        (one.clone(), one.clone()),
    )?;
    let seq = invariant_sequence(&kg, 10);
    if seq.k.len() != 10 || seq.h.len() != 10 || seq.k.iter().chain(&seq.h).any(|v| *v != one) {
        return fail(format!("u_xy − u sequence k = {:?}, h = {:?}", seq.k, seq.h));
    }
    expect_eq(
        "reasons",
        (seq.k_reason, seq.h_reason),
        (Truncation::DepthReached, Truncation::DepthReached),
    )?;
    expect_eq("u_xy − u verdict", darboux_status(&seq).name(), "inconclusive")?;
    if t.elapsed() > limit {
        return fail(format!("u_xy − u took {:?}", t.elapsed()));
    }
    for s in ["Dx*Dy + y*Dx", "Dx*Dy"] {
        let t = Instant::now();
        let st = darboux_status(&invariant_sequence(&eq(s)?, 10));
        match &st {
            DarbouxStatus::IntegrableBothSides { k, h } if k.level == 0 && h.level == 0 => {}
            other => return fail(format!("{s}: {} {other:?}", other.name())),
        }
        if t.elapsed() > limit {
            return fail(format!("{s} took {:?}", t.elapsed()));
        }
    }
    Ok("u_xy − u inconclusive with k = h = 1; u_xy + y u_x and u_xy integrable at level 0".into())
}

fn oracle_equivalence(corpus: &[common::Member]) -> Outcome {
    let mut systems: Vec<(String, PDESystem)> = CASES
        .iter()
        .map(|t| (t.replace('\n', ", "), common::system(t)))
        .collect();
    systems.extend(
        corpus
            .iter()
            .filter(|m| m.constant)
            .map(|m| (m.name.clone(), m.system.clone())),
    );
    let n = compare(&systems, 8)?;
    Ok(format!("{n} constant-coefficient systems agree up to order 8"))
}

fn property_suite() -> Outcome {
    let mut total = 0;
    for (name, cases, r) in algebra_suite() {
        r.map_err(|e| format!("{name}: {e}"))?;
        total += cases;
    }
    if total < 10_000 {
        return fail(format!("only {total} cases"));
    }
    Ok(format!("{total} randomized cases, no failures"))
}

fn main() {
    let corpus = common::corpus();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("golden solution, example 1", Box::new(example_one)),
        ("golden solution and route, example 2", Box::new(example_two)),
        ("golden solution, example 3", Box::new(example_three)),
        ("type counts R(n) and lists", Box::new(zoo_table)),
        (
            "complexity law on the corpus",
            Box::new(|| complexity_law_on_corpus(&corpus)),
        ),
        ("inverse contracts", Box::new(|| inverse_contracts_on_corpus(&corpus))),
        ("κ(kE_k) and the complexity bound", Box::new(kek_complexity)),
        ("classical Laplace chain", Box::new(classical_chain)),
        (
            "staircase against brute force",
            Box::new(|| oracle_equivalence(&corpus)),
        ),
        ("algebra property suite", Box::new(property_suite)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
