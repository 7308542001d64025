//! Antiderivatives of rational functions with respect to one variable,
//! treating the other as a parameter.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{rat, Poly, Var};
use super::ratfunc::RatFunc;
use super::upoly::UPoly;

/// `∫ a dv = rational_part + Σ c_i log(arg_i) + ∫ residual dv`.
///
/// Log coefficients are free of `v`; arguments are primitive polynomials.
/// The residual is the piece whose logarithmic part needs algebraic
/// residues, and is `None` when the integral is elementary over `Q(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Integral {
    pub var: Var,
    pub rational_part: RatFunc,
    pub log_terms: Vec<(RatFunc, Poly)>,
    pub residual: Option<RatFunc>,
}

impl Integral {
    pub fn is_closed(&self) -> bool {
        self.residual.is_none()
    }

    /// Differentiates the closed part and adds back the residual.
    pub fn derivative(&self) -> RatFunc {
        let mut acc = self.rational_part.derive(self.var);
        for (c, p) in &self.log_terms {
            let pr = RatFunc::from_poly(p.clone());
            let dp = RatFunc::from_poly(p.derive(self.var));
            acc = &acc + &(c * &dp.checked_div(&pr).unwrap());
        }
        if let Some(r) = &self.residual {
            acc = &acc + r;
        }
        acc
    }
}

pub type IntegralX = Integral;

/// Antiderivative in `x` (Hermite reduction plus Rothstein–Trager logs with
/// residues in `Q(y)`).
pub fn rf_integrate_x(a: &RatFunc) -> Integral {
    let num = UPoly::from_poly_x(a.num());
    let den = UPoly::from_poly_x(a.den());
    let lc = den.lc();
    let den = den.monic();
    let num = num.scale(&lc.inv().unwrap());
    let (q, r) = num.divrem(&den);

    let mut rational = integrate_poly(&q);
    let (g, h_num, h_den) = hermite(&r, &den);
    rational = &rational + &g;

    let (log_terms, residual) = if h_num.is_zero() {
        (Vec::new(), None)
    } else {
        log_part(&h_num, &h_den)
    };
    Integral {
        var: Var::X,
        rational_part: rational,
        log_terms,
        residual,
    }
}

/// Antiderivative in `y`, via the variable swap.
pub fn rf_integrate_y(a: &RatFunc) -> Integral {
    let r = rf_integrate_x(&a.swap_vars());
    Integral {
        var: Var::Y,
        rational_part: r.rational_part.swap_vars(),
        log_terms: r
            .log_terms
            .into_iter()
            .map(|(c, p)| (c.swap_vars(), p.swap_vars().primitive_integer()))
            .collect(),
        residual: r.residual.map(|v| v.swap_vars()),
    }
}

pub fn rf_integrate(a: &RatFunc, v: Var) -> Integral {
    match v {
        Var::X => rf_integrate_x(a),
        Var::Y => rf_integrate_y(a),
    }
}

fn integrate_poly(q: &UPoly) -> RatFunc {
    let c: Vec<RatFunc> = std::iter::once(RatFunc::zero())
        .chain(
            q.coeffs()
                .iter()
                .enumerate()
                .map(|(i, v)| v.scale(&(BigRational::one() / rat(i as i64 + 1)))),
        )
        .collect();
    UPoly::new(c).to_ratfunc()
}

/// Hermite reduction of `a/d` (deg a < deg d, d monic). Returns the
/// rational part and a remainder `h_num/h_den` with square-free `h_den`.
fn hermite(a: &UPoly, d: &UPoly) -> (RatFunc, UPoly, UPoly) {
    let mut g = RatFunc::zero();
    let mut a = a.clone();
    let mut dm = UPoly::gcd(d, &d.derivative());
    let ds = d.divrem(&dm).0;
    while dm.degree() > 0 {
        let dm2 = UPoly::gcd(&dm, &dm.derivative());
        let dms = dm.divrem(&dm2).0;
        let coef = ds.mul(&dm.derivative()).divrem(&dm).0.scale(&RatFunc::from_int(-1));
        let (b, c) = UPoly::diophantine(&coef, &dms, &a).expect("coprime factors");
        a = c.sub(&b.derivative().mul(&ds).divrem(&dms).0);
        g = &g + &b.to_ratfunc().checked_div(&dm.to_ratfunc()).unwrap();
        dm = dm2;
    }
    let (q, r) = a.divrem(&ds);
    g = &g + &integrate_poly(&q);
    (g, r, ds)
}

/// Rothstein–Trager on `a/d`, d square-free and monic, deg a < deg d.
fn log_part(a: &UPoly, d: &UPoly) -> (Vec<(RatFunc, Poly)>, Option<RatFunc>) {
    let dp = d.derivative();
    let n = d.degree() as usize;
    // R(z) = res_x(d, a - z d'), degree <= n in z: evaluate and interpolate.
    let pts: Vec<RatFunc> = (0..=n as i64).map(RatFunc::from_int).collect();
    let vals: Vec<RatFunc> = pts.iter().map(|z| UPoly::resultant(d, &a.sub(&dp.scale(z)))).collect();
    let rz = interpolate(&pts, &vals);
    let roots = roots_in_field(&rz);

    let mut logs = Vec::new();
    let mut covered = RatFunc::zero();
    for z in roots {
        let v = UPoly::gcd(d, &a.sub(&dp.scale(&z)));
        if v.degree() <= 0 {
            continue;
        }
        let vr = v.to_ratfunc();
        covered = &covered + &(&z * &v.derivative().to_ratfunc().checked_div(&vr).unwrap());
        logs.push((z, v.to_poly_x()));
    }
    let total = a.to_ratfunc().checked_div(&d.to_ratfunc()).unwrap();
    let rest = &total - &covered;
    let residual = if rest.is_zero() { None } else { Some(rest) };
    (logs, residual)
}

/// Newton interpolation through `(pts[i], vals[i])`.
fn interpolate(pts: &[RatFunc], vals: &[RatFunc]) -> UPoly {
    let n = pts.len();
    let mut coef: Vec<RatFunc> = vals.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &coef[i] - &coef[i - 1];
            let den = &pts[i] - &pts[i - j];
            coef[i] = num.checked_div(&den).unwrap();
        }
    }
    let mut p = UPoly::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = UPoly::new(vec![-&pts[i], RatFunc::one()]);
        p = p.mul(&lin).add(&UPoly::constant(coef[i].clone()));
    }
    p
}

/// Roots of `r` lying in `Q(y)`: linear square-free factors, plus rational
/// roots of factors with constant coefficients.
fn roots_in_field(r: &UPoly) -> Vec<RatFunc> {
    if r.degree() <= 0 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    for f in r.squarefree() {
        collect_roots(&f, &mut roots);
    }
    roots
}

fn collect_roots(f: &UPoly, out: &mut Vec<RatFunc>) {
    match f.degree() {
        d if d <= 0 => {}
        1 => out.push(-&f.coeff(0).checked_div(&f.coeff(1)).unwrap()),
        _ => out.extend(qy_roots(&f.to_poly_x())),
    }
}

/// Roots `z = r(y)` in `Q(y)` of a square-free `p(z, y)`, where `z` is
/// stored as the first variable. Each rational root of a specialization
/// `p(z, y0)` is lifted to a power series in `y - y0`, recovered as a
/// rational function by Padé approximation and checked exactly.
fn qy_roots(p: &Poly) -> Vec<RatFunc> {
    let dz = p.deg_x();
    let dy = p.deg_y().max(0) as usize;
    let lc = p.coeff_x(dz as u32);
    let pz = p.derive(Var::X);
    let mut y0 = None;
    for cand in (0..40i64).map(|k| if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 }) {
        let c = rat(cand);
        if lc.subs(Var::Y, &c).is_zero() {
            continue;
        }
        let sp = p.subs(Var::Y, &c);
        let spz = pz.subs(Var::Y, &c);
        if Poly::gcd(&sp, &spz).is_constant() {
            y0 = Some(c);
            break;
        }
    }
    let Some(y0) = y0 else { return Vec::new() };
    let sp = p.subs(Var::Y, &y0);
    let cs: Vec<BigRational> = (0..=dz as u32).map(|i| sp.coeff(i, 0)).collect();
    let n = 2 * dy + 4;
    // Coefficients of p as polynomials in t = y - y0.
    let shifted: Vec<Vec<BigRational>> = (0..=dz as u32).map(|i| series_of_poly(&p.coeff_x(i), &y0, n)).collect();
    let mut out = Vec::new();
    for z0 in rational_roots(&cs) {
        let deriv = pz.subs(Var::Y, &y0).eval(&z0, &BigRational::zero());
        let mut z = vec![BigRational::zero(); n];
        z[0] = z0;
        for k in 1..n {
            let val = eval_series(&shifted, &z, k + 1);
            z[k] = -&val[k] / &deriv;
        }
        if let Some(r) = pade(&z, &y0) {
            let check = UPoly::from_poly_x(p).eval(&r);
            if check.is_zero() {
                out.push(r);
            }
        }
    }
    out
}

fn series_of_poly(c: &Poly, y0: &BigRational, n: usize) -> Vec<BigRational> {
    // c(y0 + t) by Horner in truncated series arithmetic.
    let mut acc = vec![BigRational::zero(); n];
    let deg = c.deg_y().max(0) as u32;
    for j in (0..=deg).rev() {
        let mut next = vec![BigRational::zero(); n];
        for k in 0..n {
            next[k] += &acc[k] * y0;
            if k + 1 < n {
                next[k + 1] += &acc[k];
            }
        }
        next[0] += c.coeff(0, j);
        acc = next;
    }
    acc
}

fn series_mul(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval_series(coeffs: &[Vec<BigRational>], z: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); n];
    for c in coeffs.iter().rev() {
        acc = series_mul(&acc, z, n);
        for k in 0..n {
            acc[k] += &c[k];
        }
    }
    acc
}

/// Rational reconstruction of a truncated series in `t = y - y0`.
fn pade(s: &[BigRational], y0: &BigRational) -> Option<RatFunc> {
    let n = s.len();
    let tpoly = |v: &[BigRational]| UPoly::new(v.iter().map(|c| RatFunc::constant(c.clone())).collect());
    let mut modulus = vec![BigRational::zero(); n + 1];
    modulus[n] = BigRational::one();
    let (mut r0, mut r1) = (tpoly(&modulus), tpoly(s));
    let (mut t0, mut t1) = (UPoly::zero(), UPoly::constant(RatFunc::one()));
    while !r1.is_zero() && 2 * r1.degree() >= n as i64 {
        let (q, r) = r0.divrem(&r1);
        let t2 = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() {
        return None;
    }
    // Substitute t = y - y0 back.
    let t = RatFunc::y() - RatFunc::constant(y0.clone());
    let num = r1.eval(&t);
    let den = t1.eval(&t);
    num.checked_div(&den).ok()
}

/// Distinct rational roots of a polynomial with rational coefficients.
fn rational_roots(cs: &[BigRational]) -> Vec<BigRational> {
    let mut l = BigInt::one();
    for c in cs {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = cs
        .iter()
        .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    // Strip zero roots.
    let mut out = Vec::new();
    let k = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if k > 0 {
        out.push(BigRational::zero());
    }
    let ints = &ints[k..];
    let a0 = ints[0].abs();
    let an = ints[ints.len() - 1].abs();
    let (Some(p0), Some(pn)) = (a0.to_u64(), an.to_u64()) else {
        return out;
    };
    if p0 > 1_000_000_000_000 || pn > 1_000_000_000_000 {
        return out;
    }
    let eval = |x: &BigRational| {
        let mut acc = BigRational::zero();
        for c in ints.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    };
    for p in divisors(p0) {
        for q in divisors(pn) {
            for s in [1i64, -1] {
                let cand = BigRational::new(BigInt::from(p) * s, BigInt::from(q));
                if eval(&cand).is_zero() && !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut d = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            d.push(i);
            if i * i != n {
                d.push(n / i);
            }
        }
        i += 1;
    }
    d
}
