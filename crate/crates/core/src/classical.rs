//! The classical Laplace cascade for one hyperbolic equation
//! `u_xy + a u_x + b u_y + c u = 0` written in characteristic coordinates.

use std::fmt;

use thiserror::Error;

use crate::diffop::{op_mul, DiffOp, Mono};
use crate::formal::{complete_ops, spencer_numbers, symbol_profile};
use crate::ratfield::{RatFunc, Var};
use crate::zoo::TypeSig;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassicalError {
    /// The invariant of the requested side vanishes: the equation has an
    /// intermediate integral instead of a transform.
    #[error("{0}-invariant is zero: intermediate integral exists")]
    ZeroInvariant(Side),
    #[error("not of the form u_xy + a u_x + b u_y + c u: {0}")]
    NotNormalForm(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Factorization through `∂x + b`, invariants `k_n`.
    K,
    /// Factorization through `∂y + a`, invariants `h_n`.
    H,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::K => "k",
            Side::H => "h",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicE2 {
    pub a: RatFunc,
    pub b: RatFunc,
    pub c: RatFunc,
}

impl HyperbolicE2 {
    pub fn new(a: RatFunc, b: RatFunc, c: RatFunc) -> Self {
        HyperbolicE2 { a, b, c }
    }

    /// Reads `(a, b, c)` after dividing by the `u_xy` coefficient.
    pub fn from_op(op: &DiffOp) -> Result<Self, ClassicalError> {
        let lead = op.coeff(Mono::new(1, 1));
        let allowed = [Mono::new(1, 1), Mono::new(1, 0), Mono::new(0, 1), Mono::new(0, 0)];
        if lead.is_zero() || op.terms().any(|(m, _)| !allowed.contains(m)) {
            return Err(ClassicalError::NotNormalForm(op.to_string()));
        }
        let inv = lead.inv().expect("nonzero");
        Ok(HyperbolicE2 {
            a: &op.coeff(Mono::new(1, 0)) * &inv,
            b: &op.coeff(Mono::new(0, 1)) * &inv,
            c: &op.coeff(Mono::new(0, 0)) * &inv,
        })
    }

    pub fn to_op(&self) -> DiffOp {
        DiffOp::from_terms([
            (Mono::new(1, 1), RatFunc::one()),
            (Mono::new(1, 0), self.a.clone()),
            (Mono::new(0, 1), self.b.clone()),
            (Mono::new(0, 0), self.c.clone()),
        ])
    }

    /// `x ↔ y` together with `a ↔ b`; an involution exchanging the sides.
    pub fn swap(&self) -> Self {
        HyperbolicE2 {
            a: self.b.swap_vars(),
            b: self.a.swap_vars(),
            c: self.c.swap_vars(),
        }
    }

    /// `∂x + b`.
    pub fn x_factor(&self) -> DiffOp {
        DiffOp::dx().add(&DiffOp::from_fn(self.b.clone()))
    }

    /// `∂y + a`.
    pub fn y_factor(&self) -> DiffOp {
        DiffOp::dy().add(&DiffOp::from_fn(self.a.clone()))
    }
}

/// `k₀ = b_y + ab − c`, so that `Δ = (∂y + a)(∂x + b) − k₀`.
pub fn invariant_k0(e: &HyperbolicE2) -> RatFunc {
    &(&e.b.derive(Var::Y) + &(&e.a * &e.b)) - &e.c
}

/// `h₀ = a_x + ab − c`, so that `Δ = (∂x + b)(∂y + a) − h₀`.
pub fn invariant_h0(e: &HyperbolicE2) -> RatFunc {
    &(&e.a.derive(Var::X) + &(&e.a * &e.b)) - &e.c
}

/// The equation for `v = (∂x + b) u`:
/// `(∂x + b) ∘ k₀⁻¹ (∂y + a) − 1`, rescaled to a unit `u_xy` coefficient.
pub fn laplace_transform_y(e: &HyperbolicE2) -> Result<HyperbolicE2, ClassicalError> {
    let k0 = invariant_k0(e);
    let Ok(kinv) = k0.inv() else {
        return Err(ClassicalError::ZeroInvariant(Side::K));
    };
    let right = e.y_factor().scale(&kinv);
    let d1 = op_mul(&e.x_factor(), &right).sub(&DiffOp::one());
    HyperbolicE2::from_op(&d1)
}

/// The mirrored transform `v = (∂y + a) u`, through the swap.
pub fn laplace_transform_x(e: &HyperbolicE2) -> Result<HyperbolicE2, ClassicalError> {
    laplace_transform_y(&e.swap())
        .map(|t| t.swap())
        .map_err(|_| ClassicalError::ZeroInvariant(Side::H))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    HitZero,
    DepthReached,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaplaceSeq {
    pub k: Vec<RatFunc>,
    pub h: Vec<RatFunc>,
    pub depth: usize,
    pub k_reason: Truncation,
    pub h_reason: Truncation,
    /// `Δ₀, Δ₁, …` on each side, one per recorded invariant.
    pub k_chain: Vec<HyperbolicE2>,
    pub h_chain: Vec<HyperbolicE2>,
}

fn one_side(
    e: &HyperbolicE2,
    depth: usize,
    inv: fn(&HyperbolicE2) -> RatFunc,
    step: fn(&HyperbolicE2) -> Result<HyperbolicE2, ClassicalError>,
) -> (Vec<RatFunc>, Vec<HyperbolicE2>, Truncation) {
    let mut vals = Vec::new();
    let mut chain = Vec::new();
    let mut cur = e.clone();
    while vals.len() < depth {
        let v = inv(&cur);
        vals.push(v.clone());
        chain.push(cur.clone());
        if v.is_zero() {
            return (vals, chain, Truncation::HitZero);
        }
        if vals.len() == depth {
            break;
        }
        cur = step(&cur).expect("invariant is nonzero");
    }
    (vals, chain, Truncation::DepthReached)
}

pub fn invariant_sequence(e: &HyperbolicE2, depth: usize) -> LaplaceSeq {
    let (k, k_chain, k_reason) = one_side(e, depth, invariant_k0, laplace_transform_y);
    let (h, h_chain, h_reason) = one_side(e, depth, invariant_h0, laplace_transform_x);
    LaplaceSeq {
        k,
        h,
        depth,
        k_reason,
        h_reason,
        k_chain,
        h_chain,
    }
}

/// Intermediate integral found when the invariant of level `n` vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntermediateIntegral {
    pub side: Side,
    pub level: usize,
    /// `n + 1`.
    pub order: u32,
    /// `M = (∂x + b_n) ⋯ (∂x + b_0)` on the `k` side, mirrored on the `h` side.
    /// Every solution of `Δ` with `M u = 0` lies in the subclass reached by
    /// the vanishing first-order factor.
    pub constraint: DiffOp,
    /// The pair `{Δ, M}`, or just `M` when it generates `Δ`.
    pub pair: Vec<DiffOp>,
    /// Type and class of the pair as computed by the formal analysis.
    pub pair_type: Option<TypeSig>,
    pub pair_omega: Option<u32>,
}

impl IntermediateIntegral {
    /// Type of the reduced pair, `E2+E{n+1}` in general.
    pub fn descriptor(&self) -> String {
        match &self.pair_type {
            Some(t) => t.to_string(),
            None => format!("E2+E{}", self.order),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DarbouxStatus {
    IntegrableBothSides {
        k: IntermediateIntegral,
        h: IntermediateIntegral,
    },
    SemiIntegrable(IntermediateIntegral),
    Inconclusive(usize),
}

impl DarbouxStatus {
    pub fn name(&self) -> &'static str {
        match self {
            DarbouxStatus::IntegrableBothSides { .. } => "integrable_both_sides",
            DarbouxStatus::SemiIntegrable(_) => "semi_integrable",
            DarbouxStatus::Inconclusive(_) => "inconclusive",
        }
    }
}

fn integral(chain: &[HyperbolicE2], side: Side) -> IntermediateIntegral {
    let n = chain.len() - 1;
    let mut m = DiffOp::one();
    for e in chain {
        let f = match side {
            Side::K => e.x_factor(),
            Side::H => e.y_factor(),
        };
        m = op_mul(&f, &m);
    }
    let delta = chain[0].to_op();
    // At level zero Δ is a multiple of M and the pair collapses to M.
    let pair = if complete_ops(&[m.clone()]).contains(&delta) {
        vec![m.clone()]
    } else {
        vec![delta, m.clone()]
    };
    let ci = complete_ops(&pair);
    let pair_type = spencer_numbers(&ci).ok().map(|s| s.type_sig);
    let pair_omega = symbol_profile(&ci).ok().map(|p| p.omega);
    IntermediateIntegral {
        side,
        level: n,
        order: n as u32 + 1,
        constraint: m,
        pair,
        pair_type,
        pair_omega,
    }
}

pub fn darboux_status(seq: &LaplaceSeq) -> DarbouxStatus {
    let k = (seq.k_reason == Truncation::HitZero).then(|| integral(&seq.k_chain, Side::K));
    let h = (seq.h_reason == Truncation::HitZero).then(|| integral(&seq.h_chain, Side::H));
    match (k, h) {
        (Some(k), Some(h)) => DarbouxStatus::IntegrableBothSides { k, h },
        (Some(i), None) | (None, Some(i)) => DarbouxStatus::SemiIntegrable(i),
        (None, None) => DarbouxStatus::Inconclusive(seq.depth),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ratfunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn eq(a: &str, b: &str, c: &str) -> HyperbolicE2 {
        HyperbolicE2::new(rf(a), rf(b), rf(c))
    }

    #[test]
    fn klein_gordon_is_a_fixed_point() {
        let e = eq("0", "0", "-1");
        assert_eq!(laplace_transform_y(&e).unwrap(), e);
        let s = invariant_sequence(&e, 3);
        assert_eq!(s.k, vec![RatFunc::one(); 3]);
        assert_eq!(s.h_reason, Truncation::DepthReached);
    }

    #[test]
    fn factorized_equation_has_integrals_of_order_one() {
        let e = eq("y", "0", "0");
        assert_eq!(laplace_transform_y(&e), Err(ClassicalError::ZeroInvariant(Side::K)));
        match darboux_status(&invariant_sequence(&e, 3)) {
            DarbouxStatus::IntegrableBothSides { k, h } => {
                assert_eq!((k.order, h.order), (1, 1));
                assert_eq!(k.pair_omega, Some(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semi_integrable_at_level_one() {
        // k0 = 2/(x+y)^2 ≠ 0, k1 = 0 for a = 0, b = 0, c = -2/(x+y)^2.
        let e = eq("0", "0", "-2/(x+y)^2");
        let s = invariant_sequence(&e, 4);
        assert_eq!(s.k.len(), 2);
        assert!(s.k[1].is_zero());
        let st = darboux_status(&s);
        let i = match &st {
            DarbouxStatus::SemiIntegrable(i) | DarbouxStatus::IntegrableBothSides { k: i, .. } => i,
            other => panic!("{other:?}"),
        };
        assert_eq!(i.order, 2);
        assert_eq!(i.descriptor(), "2E2");
        assert_eq!(i.pair_omega, Some(1));
    }
}
