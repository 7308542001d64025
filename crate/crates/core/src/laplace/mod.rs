//! Generalized Laplace transformations `v = X u` for class-one systems whose
//! characteristic is `∂x`, and integration by iterating them.

mod integrate;
mod invariants;
mod step;

pub use integrate::{complexity_trace, integrate, integrate_full, verify_solution, Integration, Terminal, TraceEntry};
pub use invariants::{relative_invariants, RelativeInvariants};
pub use step::{
    inverse_operator_alt, inverse_unique_check, laplace_step, preimage_ideal, FrobeniusInverse, InverseKind,
    LaplaceStep,
};

use crate::diffop::{rewrite_in_frame, DiffOp, DiffOpError, Frame};
use crate::formal::{
    complete, is_compatible, symbol_profile, Compatibility, CompletedIdeal, FormalError, PDESystem, SymbolProfile,
};
use crate::ratfield::RatFunc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaplaceError {
    #[error("system is incompatible: hidden consequence of order {order}: {witness}")]
    Incompatible { order: u32, witness: DiffOp },
    #[error("class ω = {0}, the transformation needs ω = 1")]
    NotClassOne(u32),
    #[error("characteristic divisor is {0}, not ξ; straighten the characteristic first")]
    CharNotStraightened(String),
    #[error("the gauge condition is differential, not algebraic")]
    GaugeEquationDifferential,
    #[error("no invariant table for type {0}")]
    UnsupportedType(String),
    #[error("reduced to a finite-type system of order {order} that is not solved by quadratures")]
    ReducedToODE { order: u32, system: Vec<DiffOp> },
    #[error("quadrature not expressible in closed form: {0}")]
    QuadratureResidual(String),
    #[error(transparent)]
    Formal(#[from] FormalError),
    #[error(transparent)]
    Op(#[from] DiffOpError),
}

/// Shift `X ↦ X + a` and rescaling `u ↦ σ u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeChoice {
    pub a: RatFunc,
    pub sigma: RatFunc,
}

impl GaugeChoice {
    pub fn shift(a: RatFunc) -> Self {
        GaugeChoice {
            a,
            sigma: RatFunc::one(),
        }
    }
}

/// Completes, checks compatibility and that the system has class one with
/// characteristic `∂x`.
pub(crate) fn prepare(sys: &PDESystem) -> Result<(CompletedIdeal, SymbolProfile), LaplaceError> {
    let ci = complete(sys);
    if let Compatibility::Incompatible { order, witness } = is_compatible(sys, &ci) {
        return Err(LaplaceError::Incompatible { order, witness });
    }
    let profile = symbol_profile(&ci)?;
    check_class_one(&profile)?;
    Ok((ci, profile))
}

pub(crate) fn check_class_one(p: &SymbolProfile) -> Result<(), LaplaceError> {
    if p.omega != 1 {
        return Err(LaplaceError::NotClassOne(p.omega));
    }
    if !p.char_divisor.is_xi() {
        return Err(LaplaceError::CharNotStraightened(p.char_divisor.to_string()));
    }
    Ok(())
}

pub(crate) fn sorted_basis(ci: &CompletedIdeal) -> Vec<DiffOp> {
    let mut gens = ci.basis.clone();
    gens.sort_by_key(|g| {
        let m = g.lm().unwrap();
        (m.dy, m)
    });
    gens
}

/// Reduced basis with framed leading monomials `Y^j X^i`, `j` increasing.
pub fn normalize_generators(sys: &PDESystem) -> Result<PDESystem, LaplaceError> {
    let (ci, _) = prepare(sys)?;
    Ok(PDESystem::new(sorted_basis(&ci))?.with_frame(sys.frame().clone()))
}

/// The shift of `X` fixed by the generator with leading word `Y^J X`, `J`
/// maximal: its `Y^J` coefficient is absorbed into `X`. Any other shift
/// would raise the highest pure-`Y` term.
pub fn basic_gauge(sys: &PDESystem) -> Result<(GaugeChoice, PDESystem), LaplaceError> {
    let fr = sys.frame().clone();
    let top = sys
        .generators()
        .iter()
        .filter_map(|g| g.lm().filter(|m| m.dx == 1 && m.dy >= 1).map(|m| (m.dy, g)))
        .max_by_key(|(j, _)| *j);
    let Some((j, g)) = top else {
        return Ok((GaugeChoice::shift(fr.a.clone()), sys.clone()));
    };
    let c = rewrite_in_frame(g, &fr).get(j, 0);
    let a = &fr.a + &c;
    let out = sys.clone().with_frame(Frame::new(a.clone(), fr.b.clone()));
    Ok((GaugeChoice::shift(a), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::Mono;
    use crate::parse::{parse, parse_ratfunc};

    pub(crate) fn sys(text: &str) -> PDESystem {
        PDESystem::new(parse(text).unwrap().equations).unwrap()
    }

    #[test]
    fn gauge_of_two_e_two() {
        // X^2 u + 2/(x+y) X u = 0, Y X u - 2/(x+y)^2 u = 0 for X = Dx + x.
        let s = sys("u_xx + (2*x + 2/(x+y))*u_x + (x^2 + 1 + 2*x/(x+y))*u = 0\nu_xy + x*u_y - 2/(x+y)^2*u = 0\n");
        let n = normalize_generators(&s).unwrap();
        assert_eq!(n.generators()[0].lm(), Some(Mono::new(2, 0)));
        let (g, _) = basic_gauge(&n).unwrap();
        assert_eq!(g.a, parse_ratfunc("x").unwrap());
    }

    #[test]
    fn normalization_is_idempotent() {
        let s = sys("u_xy = 0\nu_xx = 0\n");
        let n = normalize_generators(&s).unwrap();
        assert_eq!(normalize_generators(&n).unwrap(), n);
    }

    #[test]
    fn rejects_other_characteristic() {
        let s = sys("u_yy = 0\nu_xy = 0\n");
        assert!(matches!(
            normalize_generators(&s),
            Err(LaplaceError::CharNotStraightened(_))
        ));
    }
}
