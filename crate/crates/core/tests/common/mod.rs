//! Generated corpus of compatible class-one systems with characteristic `∂x`.
//!
//! Each member is the system annihilating `L[u₀]` where `u₀` runs over the
//! solutions of a simple base system and `L` is a fixed operator. Members
//! with constant `L` and constant bases have constant coefficients.

#![allow(dead_code)]

pub mod law;
pub mod oracle;
pub mod props;

use omega_core::formal::{complete, spencer_numbers, symbol_profile, PDESystem};
use omega_core::laplace::{preimage_ideal, relative_invariants};
use omega_core::parse::{parse, parse_operator};

pub struct Member {
    pub name: String,
    pub system: PDESystem,
    pub constant: bool,
    pub type_sig: String,
    /// Symbol class such as `Υ23^1`, when the type has an invariant table.
    pub class: Option<String>,
    pub label: Option<String>,
}

pub fn system(text: &str) -> PDESystem {
    PDESystem::new(parse(text).unwrap().equations).unwrap()
}

const RATIONAL_BASES: [&str; 4] = [
    "u_x = 0",
    "u_xx = 0\nu_xy = 0",
    "u_xxx = 0\nu_xy = 0",
    "u_xx = 0\nu_xyy = 0",
];

const RATIONAL_OPS: [&str; 8] = [
    "Dy + x",
    "y*Dy + x + 1",
    "Dy^2 + x*Dy + y",
    "Dy^2 + x^2",
    "x*Dy^2 + y*Dy + 1",
    "Dy + x^2 + y",
    "(x + y)*Dy + 1",
    "Dy^2 + x*y",
];

const CONSTANT_BASES: [&str; 5] = [
    "u_xx = 0\nu_xy = 0",
    "u_xx - u_x = 0\nu_xy = 0",
    "u_xx - u_x = 0\nu_xy - u_x = 0",
    "u_xxx = 0\nu_xy = 0",
    "u_xx = 0\nu_xyy = 0",
];

const CONSTANT_OPS: [&str; 3] = ["Dx + Dy + 2", "Dx*Dy + Dy + 1", "Dy^2 + 2*Dx + 1"];

fn member(name: String, sys: PDESystem, constant: bool) -> Option<Member> {
    let ci = complete(&sys);
    let p = symbol_profile(&ci).ok()?;
    if p.omega != 1 || !p.char_divisor.is_xi() {
        return None;
    }
    let type_sig = spencer_numbers(&ci).ok()?.type_sig.to_string();
    let inv = relative_invariants(&sys).ok();
    Some(Member {
        name,
        system: sys,
        constant,
        type_sig,
        class: inv.as_ref().map(|r| r.class.clone()),
        label: inv.map(|r| r.label),
    })
}

fn preimages(bases: &[&str], ops: &[&str], constant: bool, out: &mut Vec<Member>) {
    for b in bases {
        let base = complete(&system(b));
        for l in ops {
            let ci = preimage_ideal(&base, &parse_operator(l).unwrap());
            if ci.trivial || ci.basis.is_empty() {
                continue;
            }
            let name = format!("({}) : {l}", b.replace('\n', ", "));
            out.extend(member(name, ci.to_system(), constant));
        }
    }
}

/// Hand-written members for symbol classes the preimages rarely reach.
const EXTRA: [&str; 4] = [
    // Monomial 2E3 of the second class.
    "u_xxx = 0\nu_xyy = 0",
    // 2E3 of the first class: symbols X^2 Y and (X^2 + Y^2) X.
    "u_xxy = 0\nu_xyy + u_xxx = 0",
    "u_xxy = 0\nu_xyy - u_xxx = 0",
    "u_xx = 0\nu_xy = 0",
];

pub fn corpus() -> Vec<Member> {
    let mut out = Vec::new();
    preimages(&RATIONAL_BASES, &RATIONAL_OPS, false, &mut out);
    preimages(&CONSTANT_BASES, &CONSTANT_OPS, true, &mut out);
    for e in EXTRA {
        out.extend(member(e.replace('\n', ", "), system(e), true));
    }
    out
}

/// Sub-cases whose inverse lowers the complexity by exactly one.
pub fn is_generic(label: &str) -> bool {
    matches!(label, "Υ22^a" | "Υ23^1a" | "Υ333^a" | "Υ33^1a")
}
