//! Symbolic Laplace transformations for overdetermined linear systems of
//! PDEs in two independent variables with one arbitrary function in the
//! general solution.

pub mod classical;
pub mod diffop;
pub mod formal;
pub mod laplace;
pub mod linalg;
pub mod parse;
pub mod ratfield;
pub mod solution;
pub mod zoo;
