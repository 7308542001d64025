//! Iterating transformations down to a first-order equation or a Frobenius
//! system and assembling the general solution from the inverses.

use std::collections::BTreeMap;

use super::invariants::branch_label;
use super::step::{step_from_ideal, InverseKind, LaplaceStep};
use super::{check_class_one, prepare, LaplaceError};
use crate::diffop::{DiffOp, Mono};
use crate::formal::{complete_ops, symbol_profile, CompletedIdeal, PDESystem};
use crate::ratfield::{rf_integrate_x, rf_integrate_y, RatFunc, Var};
use crate::solution::{ExpPart, Scalar, SolutionExpr};
use crate::zoo::TypeSig;

/// The system reached when no further transformation applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// `(∂x + b) v = 0`.
    FirstOrder { b: RatFunc },
    /// `(∂x + p) v = 0`, `(∂y + q) v = 0`.
    Frobenius { p: RatFunc, q: RatFunc },
    /// Only `v = 0`.
    Zero,
}

impl Terminal {
    pub fn describe(&self) -> String {
        match self {
            Terminal::FirstOrder { .. } => "E1".into(),
            Terminal::Frobenius { .. } => "Frobenius(ω=0)".into(),
            Terminal::Zero => "zero".into(),
        }
    }
}

/// One arrow of the route, with the branch taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub from: TypeSig,
    pub kappa_from: usize,
    /// Type of the transformed system, or `Frobenius(ω=0)` / `zero`.
    pub to: String,
    pub kappa_to: Option<usize>,
    pub kind: InverseKind,
    /// Sub-case label when the source type has an invariant table,
    /// otherwise the inverse kind.
    pub branch: String,
}

#[derive(Clone, Debug)]
pub struct Integration {
    pub solution: SolutionExpr,
    pub steps: Vec<LaplaceStep>,
    pub trace: Vec<TraceEntry>,
    pub terminal: Terminal,
    pub kappa: usize,
    /// `q + #constants = κ`.
    pub shape_ok: bool,
    /// Every generator annihilates the solution; `None` when unevaluated
    /// quadratures prevent the check.
    pub verified: Option<bool>,
}

fn x_shift(x_op: &DiffOp) -> RatFunc {
    x_op.coeff(Mono::ONE)
}

fn run_steps(ci: &CompletedIdeal) -> Result<(Vec<LaplaceStep>, Terminal), LaplaceError> {
    let mut cur = ci.clone();
    let mut steps: Vec<LaplaceStep> = Vec::new();
    loop {
        if cur.trivial {
            return Ok((steps, Terminal::Zero));
        }
        let p = symbol_profile(&cur)?;
        match p.omega {
            0 => {
                let lms = cur.leading_monomials();
                if lms == [Mono::new(1, 0), Mono::new(0, 1)] {
                    let p = cur.basis[0].coeff(Mono::ONE);
                    let q = cur.basis[1].coeff(Mono::ONE);
                    return Ok((steps, Terminal::Frobenius { p, q }));
                }
                return Err(LaplaceError::ReducedToODE {
                    order: cur.max_order(),
                    system: cur.basis.clone(),
                });
            }
            1 => {
                check_class_one(&p)?;
                if cur.basis.len() == 1 && cur.basis[0].lm() == Some(Mono::new(1, 0)) {
                    let b = cur.basis[0].coeff(Mono::ONE);
                    return Ok((steps, Terminal::FirstOrder { b }));
                }
                if steps.len() > ci.max_order() as usize * 4 + 8 {
                    return Err(LaplaceError::NotClassOne(1));
                }
                let st = step_from_ideal(&cur)?;
                if let Some(k) = st.kernel_order.filter(|&k| k >= 2) {
                    let mut gens = cur.basis.clone();
                    gens.push(st.x_op.clone());
                    return Err(LaplaceError::ReducedToODE {
                        order: k,
                        system: complete_ops(&gens).basis,
                    });
                }
                cur = st.transformed.clone();
                steps.push(st);
            }
            w => return Err(LaplaceError::NotClassOne(w)),
        }
    }
}

fn trace_of(steps: &[LaplaceStep]) -> Vec<TraceEntry> {
    steps
        .iter()
        .map(|s| {
            let (to, kappa_to) = match &s.after {
                None => ("zero".to_string(), None),
                Some((_, 0, _)) => ("Frobenius(ω=0)".to_string(), None),
                Some((t, _, k)) => (t.to_string(), Some(*k)),
            };
            TraceEntry {
                from: s.type_before.clone(),
                kappa_from: s.kappa_before,
                to,
                kappa_to,
                kind: s.kind,
                branch: branch_label(s).unwrap_or_else(|| s.kind.name().to_string()),
            }
        })
        .collect()
}

/// `Φ` with `Φ_x = dx` and, when given, `Φ_y = dy`.
fn exp_integral(dx: &RatFunc, dy: Option<&RatFunc>) -> Result<ExpPart, LaplaceError> {
    let ix = rf_integrate_x(dx);
    let mut e = ExpPart {
        rat: ix.rational_part.clone(),
        ..Default::default()
    };
    for (c, p) in &ix.log_terms {
        add_log(&mut e, c, &p.monic());
    }
    if let Some(r) = &ix.residual {
        if dy.is_some() {
            return Err(LaplaceError::QuadratureResidual(format!("Int({r}, x)")));
        }
        e.quad = Some(r.clone());
    }
    let Some(dy) = dy else { return Ok(e) };
    let mut h = dy - &e.rat.derive(Var::Y);
    for (p, c) in &e.logs {
        if c.depends_on(Var::Y) {
            return Err(LaplaceError::QuadratureResidual(format!(
                "log({p}) with coefficient {c}"
            )));
        }
        let pr = RatFunc::from_poly(p.clone());
        h = &h - &(c * &RatFunc::from_poly(p.derive(Var::Y)).checked_div(&pr).unwrap());
    }
    if h.depends_on(Var::X) {
        return Err(LaplaceError::QuadratureResidual(format!(
            "inconsistent gradient {dx}, {dy}"
        )));
    }
    let iy = rf_integrate_y(&h);
    if let Some(r) = &iy.residual {
        return Err(LaplaceError::QuadratureResidual(format!("Int({r}, y)")));
    }
    e.rat = &e.rat + &iy.rational_part;
    for (c, p) in &iy.log_terms {
        add_log(&mut e, c, &p.monic());
    }
    Ok(e)
}

fn add_log(e: &mut ExpPart, c: &RatFunc, p: &crate::ratfield::Poly) {
    if p.is_constant() {
        return;
    }
    let v = e.logs.entry(p.clone()).or_default();
    *v = &*v + c;
    if v.is_zero() {
        e.logs.remove(p);
    }
}

fn integrate_coeffs(e: &SolutionExpr, v: Var) -> Result<SolutionExpr, LaplaceError> {
    let int = |s: &Scalar| {
        s.integrate(v)
            .ok_or_else(|| LaplaceError::QuadratureResidual(format!("Int({}, {})", s.to_tree(), var_name(v))))
    };
    let mut out = SolutionExpr::zero();
    for (j, s) in &e.f {
        out.put(*j, int(s)?);
    }
    out.consts = e.consts.iter().map(int).collect::<Result<_, _>>()?;
    Ok(out)
}

fn var_name(v: Var) -> &'static str {
    if v == Var::X {
        "x"
    } else {
        "y"
    }
}

fn neg(e: &SolutionExpr) -> SolutionExpr {
    e.scale(&Scalar::from_rat(RatFunc::from_int(-1)))
}

/// `∫ ρ dy` for `x`-free `ρ` by parts; returns the integrated part and
/// the coefficient `γ` of the leftover `∫ γ f dy`.
fn integrate_by_parts(rho: &SolutionExpr) -> Result<(SolutionExpr, Option<RatFunc>), LaplaceError> {
    let mut work: BTreeMap<u32, Scalar> = rho.f.clone();
    let mut acc = SolutionExpr::zero();
    acc.consts = integrate_coeffs(
        &SolutionExpr {
            f: BTreeMap::new(),
            consts: rho.consts.clone(),
        },
        Var::Y,
    )?
    .consts;
    let mut gamma = None;
    while let Some((&j, _)) = work.iter().next_back() {
        let s = work.remove(&j).unwrap();
        if j == 0 {
            let g = s
                .as_rat()
                .ok_or_else(|| LaplaceError::QuadratureResidual(format!("Int({}, y)", s.to_tree())))?;
            gamma = Some(g);
            break;
        }
        let ds = s.derive(Var::Y)?;
        acc.put(j - 1, s);
        let e = work.entry(j - 1).or_default();
        *e = e.sub(&ds);
        if e.is_zero() {
            work.remove(&(j - 1));
        }
    }
    Ok((acc, gamma))
}

fn invert_integral(step: &LaplaceStep, w: &SolutionExpr) -> Result<SolutionExpr, LaplaceError> {
    if !w.f.is_empty() {
        return Err(LaplaceError::NotClassOne(2));
    }
    let phi = exp_integral(&-&x_shift(&step.x_op), None)?;
    let s = integrate_coeffs(&w.scale(&Scalar::exp(phi.neg())), Var::X)?;
    let phi_s = Scalar::exp(phi);
    Ok(s.scale(&phi_s).add(&SolutionExpr::function(phi_s), false))
}

fn invert_frobenius(step: &LaplaceStep, w: &SolutionExpr) -> Result<SolutionExpr, LaplaceError> {
    let fi = step.frobenius.as_ref().expect("frobenius data");
    let phi = exp_integral(&-&x_shift(&step.x_op), Some(&-&fi.q))?;
    let inv = Scalar::exp(phi.neg());
    let s = integrate_coeffs(&w.scale(&inv), Var::X)?;
    let pw = w.apply(&fi.p)?;
    let rho = pw.scale(&inv).add(&neg(&s.derive(Var::Y)?), true);
    if !rho.free_of(Var::X) {
        return Err(LaplaceError::QuadratureResidual(
            "y-part of the Frobenius inverse depends on x".into(),
        ));
    }
    let (r, gamma) = integrate_by_parts(&rho)?;
    let mut core = s.add(&r, true);
    match gamma.filter(|g| !g.is_zero()) {
        // With f = g'/γ, a constant g already gives the kernel element φ0.
        Some(g) => core = core.reparametrize(&g).add(&SolutionExpr::function(Scalar::one()), true),
        None => core.consts.push(Scalar::one()),
    }
    Ok(core.scale(&Scalar::exp(phi)))
}

fn terminal_solution(t: &Terminal) -> Result<SolutionExpr, LaplaceError> {
    Ok(match t {
        Terminal::Zero => SolutionExpr::zero(),
        Terminal::FirstOrder { b } => SolutionExpr::function(Scalar::exp(exp_integral(&-b, None)?)),
        Terminal::Frobenius { p, q } => SolutionExpr::constant(Scalar::exp(exp_integral(&-p, Some(&-q))?)),
    })
}

fn assemble(steps: &[LaplaceStep], terminal: &Terminal) -> Result<SolutionExpr, LaplaceError> {
    let mut sol = terminal_solution(terminal)?;
    for st in steps.iter().rev() {
        sol = match st.kind {
            InverseKind::Differential => sol.apply(st.inverse_op.as_ref().unwrap())?,
            InverseKind::Integral => invert_integral(st, &sol)?,
            InverseKind::Frobenius => invert_frobenius(st, &sol)?,
        };
    }
    sol.normalize();
    Ok(sol)
}

/// Applies every generator to the solution; true when all results vanish.
pub fn verify_solution(sys: &PDESystem, sol: &SolutionExpr) -> Result<bool, LaplaceError> {
    for g in sys.generators() {
        if !sol.apply(g)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Full pipeline with the route, terminal and checks.
pub fn integrate_full(sys: &PDESystem) -> Result<Integration, LaplaceError> {
    let (ci, profile) = prepare(sys)?;
    let (steps, terminal) = run_steps(&ci)?;
    let solution = assemble(&steps, &terminal)?;
    let q = solution.q().map_or(0, |q| q as usize);
    let shape_ok = q + solution.num_constants() == profile.kappa;
    let verified = if solution.has_quadrature() {
        None
    } else {
        Some(verify_solution(sys, &solution)?)
    };
    Ok(Integration {
        solution,
        trace: trace_of(&steps),
        steps,
        terminal,
        kappa: profile.kappa,
        shape_ok,
        verified,
    })
}

/// General solution; errors when unevaluated quadratures remain.
pub fn integrate(sys: &PDESystem) -> Result<SolutionExpr, LaplaceError> {
    let r = integrate_full(sys)?;
    if r.solution.has_quadrature() {
        return Err(LaplaceError::QuadratureResidual(r.solution.render("f")));
    }
    Ok(r.solution)
}

/// Types, complexities and branches along the route.
pub fn complexity_trace(sys: &PDESystem) -> Result<Vec<TraceEntry>, LaplaceError> {
    let (ci, _) = prepare(sys)?;
    let (steps, _) = run_steps(&ci)?;
    Ok(trace_of(&steps))
}
