//! One transformation step: the transformed ideal `J' = {P : P·X ∈ I}`,
//! the branch of the inverse and the inverse itself.

use std::collections::BTreeMap;

use super::{basic_gauge, check_class_one, prepare, sorted_basis, GaugeChoice, LaplaceError};
use crate::diffop::{DiffOp, Mono};
use crate::formal::{complete_ops, spencer_numbers, symbol_profile, CompletedIdeal, PDESystem, Reducer};
use crate::linalg;
use crate::ratfield::RatFunc;
use crate::zoo::TypeSig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseKind {
    /// `u = L[v]`.
    Differential,
    /// `u` solves `X u = v`, `(∂y + q) u = P[v]`.
    Frobenius,
    /// `u = X⁻¹ v`.
    Integral,
}

impl InverseKind {
    pub fn name(self) -> &'static str {
        match self {
            InverseKind::Differential => "differential",
            InverseKind::Frobenius => "frobenius",
            InverseKind::Integral => "integral",
        }
    }
}

/// The first-order system `X u = v`, `(∂y + q) u = P[v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusInverse {
    pub q: RatFunc,
    pub p: DiffOp,
}

#[derive(Clone, Debug)]
pub struct LaplaceStep {
    pub gauge: GaugeChoice,
    /// `X = ∂x + a`.
    pub x_op: DiffOp,
    pub source: CompletedIdeal,
    pub transformed: CompletedIdeal,
    pub kind: InverseKind,
    pub inverse_op: Option<DiffOp>,
    pub frobenius: Option<FrobeniusInverse>,
    /// Order of `L`; `0` for Frobenius and `-1` for integral inverses.
    pub inverse_order: i32,
    pub type_before: TypeSig,
    pub kappa_before: usize,
    /// Type, `ω` and `κ` of the transformed system; `None` when it is the
    /// zero system.
    pub after: Option<(TypeSig, u32, usize)>,
    /// Lowest `k` with `∂y^k + …` in `I + R·X`: the kernel of `X` on the
    /// solutions solves an ODE of this order. `None` when `I ⊆ R·X`.
    pub kernel_order: Option<u32>,
}

impl LaplaceStep {
    pub fn transformed_system(&self) -> PDESystem {
        self.transformed.to_system()
    }

    /// Lists the two equations of a Frobenius inverse as operators acting on
    /// `u` (left) and `v` (right).
    pub fn inverse_system(&self) -> Option<Vec<(DiffOp, DiffOp)>> {
        let f = self.frobenius.as_ref()?;
        let y = DiffOp::dy().add(&DiffOp::from_fn(f.q.clone()));
        Some(vec![(self.x_op.clone(), DiffOp::one()), (y, f.p.clone())])
    }
}

/// Normal forms `NF_I(∂^m X)` for all `m` up to a given order.
struct Images<'a> {
    reducer: Reducer<'a>,
    monos: Vec<Mono>,
    nfs: BTreeMap<Mono, DiffOp>,
    order: u32,
}

impl<'a> Images<'a> {
    fn new(ci: &'a CompletedIdeal, x_op: &DiffOp) -> Self {
        let mut reducer = Reducer::new(&ci.basis);
        let nf0 = reducer.reduce(x_op);
        let mut nfs = BTreeMap::new();
        nfs.insert(Mono::ONE, nf0);
        Images {
            reducer,
            monos: vec![Mono::ONE],
            nfs,
            order: 0,
        }
    }

    fn extend_to(&mut self, n: u32) {
        while self.order < n {
            self.order += 1;
            for m in Mono::of_degree(self.order) {
                let (prev, e) = if m.dx > 0 {
                    (Mono::new(m.dx - 1, m.dy), Mono::new(1, 0))
                } else {
                    (Mono::new(0, m.dy - 1), Mono::new(0, 1))
                };
                let p = self.nfs[&prev].mul_left_mono(e);
                let r = self.reducer.reduce(&p);
                self.nfs.insert(m, r);
            }
        }
        self.monos = Mono::up_to(self.order).collect();
        self.monos.sort();
    }

    /// Rows indexed by every monomial occurring in the images and `extra`.
    fn matrix(&self, extra: &[DiffOp]) -> (Vec<Mono>, Vec<Vec<RatFunc>>) {
        let mut rows: Vec<Mono> = Vec::new();
        for op in self.monos.iter().map(|m| &self.nfs[m]).chain(extra) {
            for (m, _) in op.terms() {
                if !rows.contains(m) {
                    rows.push(*m);
                }
            }
        }
        rows.sort();
        let cols: Vec<&DiffOp> = self.monos.iter().map(|m| &self.nfs[m]).collect();
        let mat = rows
            .iter()
            .map(|r| cols.iter().map(|op| op.coeff(*r)).collect())
            .collect();
        (rows, mat)
    }

    /// Elements of `J'` whose leading monomials are minimal among the
    /// leading monomials of `J'` up to the current order.
    fn kernel(&self) -> Vec<DiffOp> {
        let (_, mat) = self.matrix(&[]);
        let cols = self.monos.len();
        let null = if mat.is_empty() {
            (0..cols)
                .map(|i| {
                    let mut v = vec![RatFunc::zero(); cols];
                    v[i] = RatFunc::one();
                    v
                })
                .collect()
        } else {
            linalg::nullspace(&mat, cols)
        };
        let mut out: Vec<DiffOp> = Vec::new();
        let mut lms: Vec<Mono> = Vec::new();
        let mut ops: Vec<DiffOp> = null
            .into_iter()
            .map(|v| DiffOp::from_terms(self.monos.iter().copied().zip(v)))
            .collect();
        ops.sort_by_key(|o| o.lm());
        for op in ops {
            let lm = op.lm().unwrap();
            if lms.iter().any(|l| l.divides(lm)) {
                continue;
            }
            lms.push(lm);
            out.push(op);
        }
        out
    }

    /// Solves `Σ p_m NF(∂^m X) + Σ c_l extra_l = target`.
    fn solve(&self, target: &DiffOp, extra: &[DiffOp], reverse: bool) -> Option<(DiffOp, Vec<RatFunc>)> {
        let mut all: Vec<DiffOp> = extra.to_vec();
        all.push(target.clone());
        let (rows, mat) = self.matrix(&all);
        let n = self.monos.len();
        let k = extra.len();
        // Unknown order: extra columns first, then monomials.
        let mut order: Vec<usize> = (0..n).collect();
        if reverse {
            order.reverse();
        }
        let m: Vec<Vec<RatFunc>> = rows
            .iter()
            .zip(&mat)
            .map(|(r, row)| {
                let mut v: Vec<RatFunc> = extra.iter().map(|e| e.coeff(*r)).collect();
                v.extend(order.iter().map(|&c| row[c].clone()));
                v
            })
            .collect();
        let b: Vec<RatFunc> = rows.iter().map(|r| target.coeff(*r)).collect();
        let sol = linalg::solve(&m, &b)?;
        let coeffs = sol[..k].to_vec();
        let p = DiffOp::from_terms(
            order
                .iter()
                .enumerate()
                .map(|(i, &c)| (self.monos[c], sol[k + i].clone())),
        );
        Some((p, coeffs))
    }
}

fn monos_of(ops: &[DiffOp]) -> Vec<Mono> {
    let mut v: Vec<Mono> = ops.iter().filter_map(DiffOp::lm).collect();
    v.sort();
    v
}

fn discrete(gens: &[DiffOp]) -> bool {
    let k = complete_ops(gens);
    k.trivial || symbol_profile(&k).is_ok_and(|p| p.omega <= 1)
}

/// `J'` for the given `X`, with the order of the images it was read from.
fn transformed_ideal(ci: &CompletedIdeal, x_op: &DiffOp) -> (CompletedIdeal, u32) {
    let d = ci.max_order();
    let cap = d + x_op.order().unwrap_or(0) + 6;
    let mut img = Images::new(ci, x_op);
    let mut n = d + 1;
    img.extend_to(n);
    let mut prev = monos_of(&img.kernel());
    let mut quiet = 0;
    // Stop once the leading monomials are stable and already cut out a
    // discrete characteristic variety; a missing generator of higher order
    // would leave it non-discrete.
    while quiet < 2 && n < cap {
        n += 1;
        img.extend_to(n);
        let gens = img.kernel();
        let cur = monos_of(&gens);
        if cur == prev && !gens.is_empty() && discrete(&gens) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        prev = cur;
    }
    let gens = img.kernel();
    if gens.is_empty() {
        return (
            CompletedIdeal {
                basis: vec![],
                trivial: false,
                record: vec![],
            },
            n,
        );
    }
    (complete_ops(&gens), n)
}

/// `{P : P·L ∈ I}`, the system satisfied by `L[u]` for every solution `u`
/// of `I`.
pub fn preimage_ideal(ci: &CompletedIdeal, l: &DiffOp) -> CompletedIdeal {
    transformed_ideal(ci, l).0
}

/// Lowest `k` such that `I + R·X` contains a monic operator `∂y^k + …`
/// free of `∂x`, or `None` when `I ⊆ R·X`.
fn inverse_degree(ci: &CompletedIdeal, x_op: &DiffOp) -> Option<u32> {
    let mut gens = ci.basis.clone();
    gens.push(x_op.clone());
    let k = complete_ops(&gens);
    if k.trivial {
        return Some(0);
    }
    k.leading_monomials()
        .into_iter()
        .filter(|m| m.dx == 0)
        .map(|m| m.dy)
        .min()
}

fn dy_pow(l: u32) -> DiffOp {
    DiffOp::monomial(Mono::new(0, l))
}

/// Finds `P` and `q_0..q_{k-1}` with `P·X ≡ ∂y^k + Σ q_l ∂y^l` modulo `I`.
fn relation(ci: &CompletedIdeal, x_op: &DiffOp, k: u32, start: u32, reverse: bool) -> Option<(DiffOp, Vec<RatFunc>)> {
    let mut img = Images::new(ci, x_op);
    let extra: Vec<DiffOp> = (0..k).map(|l| dy_pow(l).scale(&RatFunc::from_int(-1))).collect();
    let mut reducer = Reducer::new(&ci.basis);
    let target = reducer.reduce(&dy_pow(k));
    for n in start..start + 4 {
        img.extend_to(n);
        if let Some(r) = img.solve(&target, &extra, reverse) {
            return Some(r);
        }
    }
    None
}

/// One generalized Laplace transformation after normalization and the
/// basic gauge.
pub fn laplace_step(sys: &PDESystem) -> Result<LaplaceStep, LaplaceError> {
    let (ci, _) = prepare(sys)?;
    step_from_ideal(&ci)
}

pub(crate) fn step_from_ideal(ci: &CompletedIdeal) -> Result<LaplaceStep, LaplaceError> {
    let profile = symbol_profile(ci)?;
    check_class_one(&profile)?;
    let normalized = PDESystem::new(sorted_basis(ci))?;
    let (gauge, _) = basic_gauge(&normalized)?;
    let x_op = DiffOp::dx().add(&DiffOp::from_fn(gauge.a.clone()));
    let (transformed, n) = transformed_ideal(ci, &x_op);
    let type_before = spencer_numbers(ci)?.type_sig;
    let after = if transformed.trivial {
        None
    } else {
        let p = symbol_profile(&transformed)?;
        Some((spencer_numbers(&transformed)?.type_sig, p.omega, p.kappa))
    };
    let mut step = LaplaceStep {
        gauge,
        x_op: x_op.clone(),
        source: ci.clone(),
        transformed,
        kind: InverseKind::Integral,
        inverse_op: None,
        frobenius: None,
        inverse_order: -1,
        type_before,
        kappa_before: profile.kappa,
        after,
        kernel_order: inverse_degree(ci, &x_op),
    };
    match step.kernel_order {
        None => {}
        Some(0) => {
            let (l, _) = relation(ci, &x_op, 0, n, false).ok_or(LaplaceError::GaugeEquationDifferential)?;
            let l = step.transformed_nf(&l);
            step.inverse_order = l.order().map_or(0, |o| o as i32);
            step.inverse_op = Some(l);
            step.kind = InverseKind::Differential;
        }
        Some(1) => {
            let (p, q) = relation(ci, &x_op, 1, n, false).ok_or(LaplaceError::GaugeEquationDifferential)?;
            step.frobenius = Some(FrobeniusInverse {
                q: q[0].clone(),
                p: step.transformed_nf(&p),
            });
            step.inverse_order = 0;
            step.kind = InverseKind::Frobenius;
        }
        // Only u = X⁻¹ v remains, with a kernel of order k ≥ 2.
        Some(_) => {}
    }
    Ok(step)
}

impl LaplaceStep {
    fn transformed_nf(&self, op: &DiffOp) -> DiffOp {
        if self.transformed.basis.is_empty() {
            op.clone()
        } else {
            self.transformed.normal_form(op)
        }
    }
}

/// A second inverse produced with the opposite choice of free unknowns and
/// without reduction modulo the transformed ideal.
pub fn inverse_operator_alt(step: &LaplaceStep) -> Option<DiffOp> {
    if step.kind != InverseKind::Differential {
        return None;
    }
    let d = step.source.max_order();
    relation(&step.source, &step.x_op, 0, d + 2, true).map(|r| r.0)
}

/// Whether two inverses agree modulo the transformed ideal.
pub fn inverse_unique_check(l1: &DiffOp, l2: &DiffOp, step: &LaplaceStep) -> bool {
    let diff = l1.sub(l2);
    if step.transformed.trivial {
        return true;
    }
    step.transformed_nf(&diff).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::tests::sys;
    use crate::parse::parse_operator;

    #[test]
    fn two_e_two_generic_branch() {
        // a1 = 2/(x+y), c2 = -2/(x+y)^2: inverse u = -c2^(-1) Y v.
        let s = sys("u_xx + 2/(x+y)*u_x = 0\nu_xy - 2/(x+y)^2*u = 0\n");
        let st = laplace_step(&s).unwrap();
        assert_eq!(st.kind, InverseKind::Differential);
        assert_eq!(st.transformed.basis, vec![parse_operator("Dx + 2/(x+y)").unwrap()]);
        assert_eq!(st.inverse_op.clone().unwrap(), parse_operator("(x+y)^2/2*Dy").unwrap());
        let lx = st.inverse_op.as_ref().unwrap().mul(&st.x_op).sub(&DiffOp::one());
        assert!(st.source.contains(&lx));
    }

    #[test]
    fn two_e_two_integral_branch() {
        let s = sys("u_xx = 0\nu_xy = 0\n");
        let st = laplace_step(&s).unwrap();
        assert_eq!(st.kind, InverseKind::Integral);
        assert_eq!(st.inverse_order, -1);
        assert_eq!(
            st.transformed.leading_monomials(),
            vec![Mono::new(1, 0), Mono::new(0, 1)]
        );
        assert_eq!(st.after.as_ref().unwrap().1, 0);
    }
}
