//! The coefficient field `Q(x, y)`: exact polynomials and rational functions,
//! partial derivatives and rational antiderivatives.

mod integrate;
mod poly;
mod ratfunc;
mod upoly;

pub use integrate::{rf_integrate, rf_integrate_x, rf_integrate_y, Integral, IntegralX};
pub use poly::{rat, ratio, Poly, Var};
pub use ratfunc::{rf_arith, rf_derive, ArithOp, RatFunc};
pub use upoly::UPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatError {
    #[error("division by zero")]
    DivisionByZero,
}
