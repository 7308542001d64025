//! Named coefficients of the normalized, gauge-fixed low-complexity types
//! and the sub-case labels they select.

use std::collections::BTreeMap;

use super::step::LaplaceStep;
use super::{basic_gauge, prepare, sorted_basis, GaugeChoice, LaplaceError};
use crate::diffop::{DiffOp, Mono};
use crate::formal::{spencer_numbers, CompletedIdeal, PDESystem};
use crate::ratfield::{ratio, RatFunc, Var};
use crate::zoo::TypeSig;

/// Coefficients in the words `Y^j X^i`, keyed by `(j, i)`.
type Words = BTreeMap<(u32, u32), RatFunc>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeInvariants {
    pub type_sig: TypeSig,
    /// Symbol class, e.g. `Υ23^2`.
    pub class: String,
    /// Sub-case, e.g. `Υ23^2a`.
    pub label: String,
    pub gauge: GaugeChoice,
    /// `Y = ∂y + β ∂x` used to bring the symbols to normal form.
    pub y_shift: RatFunc,
    pub invariants: Vec<(String, RatFunc)>,
    /// Invariants that are meaningful only under a condition.
    pub conditional: Vec<(String, RatFunc, String)>,
    /// Relations implied by compatibility and the gauge, with whether they
    /// hold exactly.
    pub ties: Vec<(String, bool)>,
    /// Every named coefficient of every generator.
    pub coefficients: Vec<(String, RatFunc)>,
}

fn word_op(x: &DiffOp, y: &DiffOp, j: u32, i: u32) -> DiffOp {
    let mut acc = DiffOp::one();
    for _ in 0..i {
        acc = x.mul(&acc);
    }
    for _ in 0..j {
        acc = y.mul(&acc);
    }
    acc
}

/// Expansion in words `Y^j X^i`; each word has leading monomial
/// `∂x^i ∂y^j` with coefficient one.
fn to_words(op: &DiffOp, x: &DiffOp, y: &DiffOp) -> Words {
    let mut rem = op.clone();
    let mut out = Words::new();
    while let Some(m) = rem.lm() {
        let c = rem.coeff(m);
        rem.sub_scaled(&c, &word_op(x, y, m.dy, m.dx));
        out.insert((m.dy, m.dx), c);
    }
    out
}

fn get(w: &Words, j: u32, i: u32) -> RatFunc {
    w.get(&(j, i)).cloned().unwrap_or_default()
}

/// Removes from `w` the leading word of `g` (lead `lead`).
fn reduce_by(w: &mut Words, g: &Words, lead: (u32, u32)) {
    let c = get(w, lead.0, lead.1);
    if c.is_zero() {
        return;
    }
    for (k, v) in g {
        let e = w.entry(*k).or_default();
        *e = &*e - &(&c * v);
        if e.is_zero() {
            w.remove(k);
        }
    }
}

fn scale_words(w: &Words, c: &RatFunc) -> Words {
    w.iter().map(|(k, v)| (*k, v * c)).collect()
}

const X2: (u32, u32) = (0, 2);
const YX: (u32, u32) = (1, 1);
const Y2: (u32, u32) = (2, 0);
const X1: (u32, u32) = (0, 1);
const Y1: (u32, u32) = (1, 0);
const ONE: (u32, u32) = (0, 0);

fn name(letters: &[(char, (u32, u32))], idx: usize, w: &Words, out: &mut Vec<(String, RatFunc)>) {
    for (l, (j, i)) in letters {
        out.push((format!("{l}{idx}"), get(w, *j, *i)));
    }
}

fn lookup(coeffs: &[(String, RatFunc)], n: &str) -> RatFunc {
    coeffs
        .iter()
        .find(|(k, _)| k == n)
        .map(|(_, v)| v.clone())
        .unwrap_or_default()
}

/// The relative invariants of a compatible class-one system of complexity
/// at most three with its characteristic straightened to `∂x`.
/// A generator, if present, with its leading word `(j, i)`.
type Slot = (Option<DiffOp>, (u32, u32));

pub fn relative_invariants(sys: &PDESystem) -> Result<RelativeInvariants, LaplaceError> {
    let (ci, _) = prepare(sys)?;
    invariants_of_ideal(&ci)
}

pub(crate) fn branch_label(step: &LaplaceStep) -> Option<String> {
    invariants_of_ideal(&step.source).ok().map(|r| r.label)
}

pub(crate) fn invariants_of_ideal(ci: &CompletedIdeal) -> Result<RelativeInvariants, LaplaceError> {
    let sig = spencer_numbers(ci)?.type_sig;
    let t = sig.to_string();
    let basis = sorted_basis(ci);
    let by_lm = |dx: u32, dy: u32| basis.iter().find(|g| g.lm() == Some(Mono::new(dx, dy))).cloned();
    let lms = ci.leading_monomials();
    let has = |dx: u32, dy: u32| lms.contains(&Mono::new(dx, dy));
    // Generators in the order of the tables, with their leading words.
    let (class, found): (&str, Vec<Slot>) = match t.as_str() {
        "2E2" => ("Υ22", vec![(by_lm(2, 0), X2), (by_lm(1, 1), YX)]),
        "E2+E3" if has(1, 1) => ("Υ23^1", vec![(by_lm(1, 1), YX), (by_lm(3, 0), (0, 3))]),
        "E2+E3" => ("Υ23^2", vec![(by_lm(2, 0), X2), (by_lm(1, 2), (2, 1))]),
        "3E3" => (
            "Υ333",
            vec![(by_lm(3, 0), (0, 3)), (by_lm(2, 1), (1, 2)), (by_lm(1, 2), (2, 1))],
        ),
        "2E3" if has(3, 0) => ("Υ33^2", vec![(by_lm(3, 0), (0, 3)), (by_lm(1, 2), (2, 1))]),
        "2E3" => ("Υ33^1", vec![(by_lm(2, 1), (1, 2)), (by_lm(1, 2), (2, 1))]),
        _ => return Err(LaplaceError::UnsupportedType(t)),
    };
    let mut gens = Vec::new();
    for (g, w) in found {
        match g {
            Some(g) => gens.push((g, w)),
            None => return Err(LaplaceError::UnsupportedType(t)),
        }
    }
    let normalized = PDESystem::new(basis.clone())?;
    let (gauge, _) = basic_gauge(&normalized)?;
    let x = DiffOp::dx().add(&DiffOp::from_fn(gauge.a.clone()));

    // Auxiliary shift Y = ∂y + β ∂x making the symbols normal.
    let beta = match class {
        "Υ23^1" | "Υ33^1" => gens[0].0.coeff(Mono::new(gens[0].0.order().unwrap(), 0)),
        "Υ33^2" => gens[1].0.coeff(Mono::new(2, 1)).scale(&ratio(1, 2)),
        _ => RatFunc::zero(),
    };
    let y = DiffOp::dy().add(&DiffOp::term(beta.clone(), 1, 0));
    let mut words: Vec<Words> = gens.iter().map(|(g, _)| to_words(g, &x, &y)).collect();
    // Clear the leading words of the other generators.
    for k in 0..words.len() {
        for l in 0..words.len() {
            if k != l {
                let g = words[l].clone();
                let lead = gens[l].1;
                reduce_by(&mut words[k], &g, lead);
            }
        }
    }
    let mut note_scale = None;
    if class == "Υ33^1" {
        // (X^2 ± Y^2) X: scale so that X^3 has coefficient one.
        let s = get(&words[1], 0, 3);
        if s.is_zero() {
            return Err(LaplaceError::UnsupportedType(t));
        }
        words[1] = scale_words(&words[1], &s.inv().unwrap());
        note_scale = Some(s);
    }

    let order3 = [('a', X2), ('b', YX), ('c', Y2), ('d', X1), ('e', Y1), ('f', ONE)];
    let mut co: Vec<(String, RatFunc)> = Vec::new();
    match class {
        "Υ22" => {
            name(&[('a', X1), ('b', Y1), ('c', ONE)], 1, &words[0], &mut co);
            name(&[('a', X1), ('b', Y1), ('c', ONE)], 2, &words[1], &mut co);
        }
        "Υ23^1" => {
            name(&[('c', X1), ('d', Y1), ('e', ONE)], 1, &words[0], &mut co);
            name(
                &[('a', X2), ('b', Y2), ('c', X1), ('d', Y1), ('e', ONE)],
                2,
                &words[1],
                &mut co,
            );
        }
        "Υ23^2" => {
            name(&[('c', X1), ('d', Y1), ('e', ONE)], 1, &words[0], &mut co);
            name(
                &[('a', YX), ('b', Y2), ('c', X1), ('d', Y1), ('e', ONE)],
                2,
                &words[1],
                &mut co,
            );
        }
        _ => {
            for (k, w) in words.iter().enumerate() {
                name(&order3, k + 1, w, &mut co);
            }
        }
    }
    let v = |n: &str| lookup(&co, n);
    let nz = |n: &str| !v(n).is_zero();
    let zero_tie = |n: &str| (format!("{n} = 0"), v(n).is_zero());
    let mut inv: Vec<(String, RatFunc)> = Vec::new();
    let mut cond: Vec<(String, RatFunc, String)> = Vec::new();
    let mut ties: Vec<(String, bool)> = Vec::new();
    let sub: String = match class {
        "Υ22" => {
            inv.push(("c2".into(), v("c2")));
            ties.extend([zero_tie("b1"), zero_tie("b2"), zero_tie("c1")]);
            if nz("c2") { "a" } else { "b" }.to_string()
        }
        "Υ23^1" => {
            inv.push(("e1".into(), v("e1")));
            ties.extend([zero_tie("b2"), zero_tie("d2"), zero_tie("d1"), zero_tie("e2")]);
            if nz("e1") { "a" } else { "b" }.to_string()
        }
        "Υ23^2" => {
            inv.push(("d2".into(), v("d2")));
            cond.push(("e2".into(), v("e2"), "d2 = 0".into()));
            ties.extend([zero_tie("d1"), zero_tie("b2"), zero_tie("e1")]);
            let s: String = if nz("d2") {
                "a"
            } else if nz("e2") {
                "b"
            } else {
                "c"
            }
            .into();
            s
        }
        "Υ333" => {
            inv.extend([("e3".into(), v("e3")), ("b1".into(), v("b1")), ("f1".into(), v("f1"))]);
            cond.push(("f2".into(), v("f2"), "f1 = 0".into()));
            cond.push(("f3".into(), v("f3"), "f1 = f2 = 0".into()));
            ties.extend([
                zero_tie("c1"),
                zero_tie("c2"),
                zero_tie("c3"),
                zero_tie("e1"),
                zero_tie("e2"),
            ]);
            ties.push(("f1 = b1*e3".into(), v("f1") == &v("b1") * &v("e3")));
            let f2 = &(&v("b2") * &v("e3")) + &v("e3").derive(Var::X);
            ties.push(("f2 = b2*e3 + X(e3)".into(), v("f2") == f2));
            let s: String = if nz("f1") {
                "a"
            } else if nz("e3") {
                if nz("f2") {
                    "b"
                } else {
                    "c"
                }
            } else if nz("f3") {
                "d"
            } else {
                "e"
            }
            .into();
            s
        }
        _ => {
            // 2E3, both symbol classes.
            inv.extend([("e2".into(), v("e2")), ("b1".into(), v("b1")), ("f1".into(), v("f1"))]);
            cond.push(("f2".into(), v("f2"), "e2 = 0".into()));
            ties.extend([zero_tie("c1"), zero_tie("c2"), zero_tie("e1")]);
            ties.push(("f1 = b1*e2".into(), v("f1") == &v("b1") * &v("e2")));
            let k = if class == "Υ33^1" { "1" } else { "2" };
            let s = if nz("f1") {
                "a"
            } else if nz("e2") {
                "b"
            } else if nz("f2") {
                "c"
            } else {
                "d"
            };
            format!("{k}{s}")
        }
    };
    let label = match class {
        "Υ23^1" => format!("Υ23^1{sub}"),
        "Υ23^2" => format!("Υ23^2{sub}"),
        "Υ33^1" | "Υ33^2" => format!("Υ33^{sub}"),
        c => format!("{c}^{sub}"),
    };
    if let Some(s) = note_scale {
        cond.push((
            "Y^2 X coefficient".into(),
            s.inv().unwrap(),
            "±1 after rescaling Y".into(),
        ));
    }
    Ok(RelativeInvariants {
        type_sig: sig,
        class: class.to_string(),
        label,
        gauge,
        y_shift: beta,
        invariants: inv,
        conditional: cond,
        ties,
        coefficients: co,
    })
}
