//! Symbol dimensions of constant-coefficient systems by counting formal
//! power series solutions directly.
//!
//! The unknowns are the Taylor coefficients `u_ab = ∂x^a ∂y^b u(0)` up to
//! total order `n`, and the equations are `∂^m G(0) = 0` for every
//! generator `G` and every `m` keeping the order within `n`.

use omega_core::diffop::{DiffOp, Mono};
use omega_core::formal::{complete, symbol_profile, PDESystem};
use omega_core::linalg::rref;
use omega_core::ratfield::RatFunc;

/// `dim g_k` for `k = 0..=kmax`, computed on jets of order `n`.
pub fn brute_gdims(gens: &[DiffOp], n: u32, kmax: u32) -> Vec<usize> {
    // Highest order first, so that rows with a low-order pivot involve
    // low-order unknowns only.
    let mut monos: Vec<Mono> = Mono::up_to(n).collect();
    monos.sort_by_key(|m| std::cmp::Reverse(m.degree()));
    let col = |m: Mono| monos.iter().position(|&x| x == m).unwrap();
    let mut rows = Vec::new();
    for g in gens {
        let d = g.order().unwrap_or(0);
        if d > n {
            continue;
        }
        for m in Mono::up_to(n - d) {
            let mut row = vec![RatFunc::zero(); monos.len()];
            for (a, c) in g.terms() {
                assert!(c.is_constant(), "oracle needs constant coefficients");
                row[col(m.add(*a))] = c.clone();
            }
            rows.push(row);
        }
    }
    let pivots = rref(&mut rows);
    // Dimension of the projection of the solution space on jets of order k.
    let proj = |k: u32| {
        let cols = monos.iter().filter(|m| m.degree() <= k).count();
        let piv = pivots.iter().filter(|&&p| monos[p].degree() <= k).count();
        cols - piv
    };
    (0..=kmax)
        .map(|k| if k == 0 { proj(0) } else { proj(k) - proj(k - 1) })
        .collect()
}

/// `dim g_k` for `k = 0..=kmax` from the staircase of the Gröbner basis,
/// continued by its stable value.
pub fn staircase_gdims(sys: &PDESystem, kmax: u32) -> Option<Vec<usize>> {
    let p = symbol_profile(&complete(sys)).ok()?;
    let last = *p.gdims.last()?;
    Some(
        (0..=kmax as usize)
            .map(|k| p.gdims.get(k).copied().unwrap_or(last))
            .collect(),
    )
}

/// Constant-coefficient systems of every class used by the oracle checks.
pub const CASES: [&str; 14] = [
    "u_x = 0\nu_y = 0",
    "u_x - u = 0\nu_y - 2*u = 0",
    "u_xy - u = 0",
    "u_xx - u_yy = 0",
    "u_xx = 0\nu_xy = 0",
    "u_xx - u_y = 0\nu_xy - u_x = 0",
    "u_xxx = 0\nu_xy = 0",
    "u_xxx = 0\nu_xxy = 0\nu_xyy = 0",
    "u_xxy = 0\nu_xyy - u_xxx = 0",
    "u_xxx = 0\nu_xyy = 0",
    "u_xxxx = 0\nu_xxxy = 0\nu_xxyy = 0\nu_xyyy = 0",
    "u_xx + u_xy + u = 0\nu_xyy - u_y = 0",
    "u_xxx + 2*u_xy - u = 0\nu_xxy + u_yy = 0",
    "u_xx + u_yy = 0\nu_xy = 0",
];

/// Compares both computations up to order `kmax` on every system; returns
/// the number of systems checked.
pub fn compare(systems: &[(String, PDESystem)], kmax: u32) -> Result<usize, String> {
    for (name, sys) in systems {
        let Some(expected) = staircase_gdims(sys, kmax) else {
            return Err(format!("{name}: no symbol profile"));
        };
        let n = kmax + sys.max_order() + 4;
        let got = brute_gdims(sys.generators(), n, kmax);
        if got != expected {
            return Err(format!("{name}: brute force {got:?}, staircase {expected:?}"));
        }
    }
    Ok(systems.len())
}
