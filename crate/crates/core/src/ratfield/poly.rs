use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Independent variable selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
}

/// Polynomial in `x, y` over the rationals. Keys are exponent pairs `(i, j)`
/// for `x^i y^j`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::monomial(0, 0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn x() -> Self {
        Poly::monomial(1, 0, BigRational::one())
    }

    pub fn y() -> Self {
        Poly::monomial(0, 1, BigRational::one())
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => Poly::x(),
            Var::Y => Poly::y(),
        }
    }

    pub fn monomial(i: u32, j: u32, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), BigRational)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (k, c) in it {
            p.add_term(k, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&k| k == (0, 0))
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms[&(0, 0)].clone())
        } else {
            None
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, k: (u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn degree(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| if v == Var::X { i } else { j }).max()
    }

    pub fn deg_x(&self) -> i64 {
        self.degree(Var::X).map_or(-1, i64::from)
    }

    pub fn deg_y(&self) -> i64 {
        self.degree(Var::Y).map_or(-1, i64::from)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.degree(v).is_some_and(|d| d > 0)
    }

    /// Leading term in graded-lex order with `x` before `y`.
    pub fn lead_grlex(&self) -> Option<((u32, u32), &BigRational)> {
        self.terms
            .iter()
            .max_by_key(|(&(i, j), _)| (i + j, i))
            .map(|(&k, c)| (k, c))
    }

    /// Leading term in lex order with `x > y`.
    fn lead_lex(&self) -> Option<((u32, u32), &BigRational)> {
        self.terms.iter().next_back().map(|(&k, c)| (k, c))
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, i: u32, j: u32, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(&(a, b), v)| ((a + i, b + j), v * c)).collect(),
        }
    }

    /// Scales so the graded-lex leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.lead_grlex() {
            None => Poly::zero(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn derive(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            match v {
                Var::X if i > 0 => out.add_term((i - 1, j), c * rat(i64::from(i))),
                Var::Y if j > 0 => out.add_term((i, j - 1), c * rat(i64::from(j))),
                _ => {}
            }
        }
        out
    }

    pub fn swap_vars(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut s = BigRational::zero();
        for (&(i, j), c) in &self.terms {
            s += c * pow_rat(x, i) * pow_rat(y, j);
        }
        s
    }

    /// Substitutes a rational value for one variable.
    pub fn subs(&self, v: Var, val: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            match v {
                Var::X => out.add_term((0, j), c * pow_rat(val, i)),
                Var::Y => out.add_term((i, 0), c * pow_rat(val, j)),
            }
        }
        out
    }

    /// Coefficient of `x^i`, a polynomial in `y` alone.
    pub fn coeff_x(&self, i: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(&(a, _), _)| a == i)
                .map(|(&(_, b), c)| ((0, b), c.clone()))
                .collect(),
        }
    }

    /// Writes `self` as `sum_i c_i(y) x^i`.
    pub fn x_coeffs(&self) -> Vec<Poly> {
        let n = self.deg_x();
        (0..=n).map(|i| self.coeff_x(i as u32)).collect()
    }

    pub fn from_x_coeffs(cs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in cs.iter().enumerate() {
            for (&(_, b), v) in &c.terms {
                out.add_term((i as u32, b), v.clone());
            }
        }
        out
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let ((di, dj), dc) = d.lead_lex().map(|(k, c)| (k, c.clone()))?;
        // A quotient term has y-degree at most deg_y(self) - dj.
        let max_q = self.deg_y() - dj as i64;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some(((ri, rj), rc)) = r.lead_lex().map(|(k, c)| (k, c.clone())) {
            if ri < di || rj < dj || (rj - dj) as i64 > max_q {
                return None;
            }
            let c = rc / &dc;
            let t = d.mul_monomial(ri - di, rj - dj, &c);
            q.add_term((ri - di, rj - dj), c);
            r = &r - &t;
        }
        Some(q)
    }

    /// Division with remainder for polynomials in a single variable `v`.
    fn divrem_uni(&self, d: &Poly, v: Var) -> (Poly, Poly) {
        let key = |k: (u32, u32)| if v == Var::X { k.0 } else { k.1 };
        let mono = |e: u32| if v == Var::X { (e, 0) } else { (0, e) };
        let dd = d.degree(v).unwrap_or(0);
        let dlc = d.coeff(mono(dd).0, mono(dd).1);
        let mut r = self.clone();
        let mut q = Poly::zero();
        loop {
            let rd = match r.degree(v) {
                Some(e) if e >= dd && !r.is_zero() => e,
                _ => break,
            };
            let rlc = r
                .terms
                .iter()
                .find(|(&k, _)| key(k) == rd)
                .map(|(_, c)| c.clone())
                .unwrap();
            let c = rlc / &dlc;
            let (mi, mj) = mono(rd - dd);
            q.add_term((mi, mj), c.clone());
            r = &r - &d.mul_monomial(mi, mj, &c);
        }
        (q, r)
    }

    /// Monic gcd of two polynomials in `y` alone.
    fn gcd_y(a: &Poly, b: &Poly) -> Poly {
        Poly::gcd_uni(a, b, Var::Y)
    }

    /// Monic gcd of two polynomials in the single variable `v`.
    fn gcd_uni(a: &Poly, b: &Poly, v: Var) -> Poly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem_uni(&b, v);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Gcd of two polynomials primitive in `x`, by specializing `y` at
    /// integer points and interpolating (Brown's dense algorithm). `None`
    /// when the interpolant fails the trial division.
    fn gcd_dense(p: &Poly, q: &Poly) -> Option<Poly> {
        let lp = p.coeff_x(p.deg_x() as u32);
        let lq = q.coeff_x(q.deg_x() as u32);
        let gamma = Poly::gcd_y(&lp, &lq);
        let needed = (gamma.deg_y() + p.deg_y().min(q.deg_y()) + 1) as usize;
        let zero = BigRational::zero();
        let mut pts: Vec<(BigRational, Poly)> = Vec::new();
        let mut deg = i64::MAX;
        for k in 0..(2 * needed as i64 + 40) {
            // 0, 1, -1, 2, -2, ...
            let y0 = BigRational::from_integer(BigInt::from(if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 }));
            if lp.eval(&zero, &y0).is_zero() || lq.eval(&zero, &y0).is_zero() {
                continue;
            }
            let g0 = Poly::gcd_uni(&p.subs(Var::Y, &y0), &q.subs(Var::Y, &y0), Var::X);
            let d = g0.deg_x();
            if d == 0 {
                return Some(Poly::one());
            }
            if d > deg {
                continue;
            }
            if d < deg {
                pts.clear();
                deg = d;
            }
            let scale = gamma.eval(&zero, &y0);
            pts.push((y0, g0.scale(&scale)));
            if pts.len() == needed {
                let h = interpolate_y(&pts).primitive_x();
                let divides = |f: &Poly| h.deg_y() <= f.deg_y() && f.exact_div(&h).is_some();
                return (divides(p) && divides(q)).then_some(h);
            }
        }
        None
    }

    /// Gcd over `Q[y]` of the `x`-coefficients.
    pub fn content_x(&self) -> Poly {
        let mut g = Poly::zero();
        for c in self.x_coeffs() {
            if c.is_zero() {
                continue;
            }
            g = if g.is_zero() { c.monic() } else { Poly::gcd_y(&g, &c) };
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_x(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content_x();
        self.exact_div(&c).expect("content divides")
    }

    /// Pseudo-remainder with respect to `x`.
    fn prem_x(&self, d: &Poly) -> Poly {
        let dd = d.deg_x();
        let dlc = d.coeff_x(dd as u32);
        let mut r = self.clone();
        while !r.is_zero() && r.deg_x() >= dd {
            let rd = r.deg_x();
            let rlc = r.coeff_x(rd as u32);
            let shifted = (&rlc * d).mul_monomial((rd - dd) as u32, 0, &BigRational::one());
            r = &(&dlc * &r) - &shifted;
        }
        r
    }

    /// Greatest common divisor, normalized to graded-lex leading coefficient one.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        if a == b {
            return a.monic();
        }
        let ca = a.content_x();
        let cb = b.content_x();
        let c = Poly::gcd_y(&ca, &cb);
        if a.deg_x() == 0 || b.deg_x() == 0 {
            return c.monic();
        }
        let mut p = a.exact_div(&ca).unwrap();
        let mut q = b.exact_div(&cb).unwrap();
        if let Some(g) = Poly::gcd_dense(&p, &q) {
            return (&c * &g).monic();
        }
        if p.deg_x() < q.deg_x() {
            std::mem::swap(&mut p, &mut q);
        }
        while !q.is_zero() {
            let r = p.prem_x(&q);
            p = q;
            q = r.primitive_x().monic();
            if !q.is_zero() && q.deg_x() == 0 {
                // Remainder free of x: primitive parts are coprime in x.
                p = Poly::one();
                q = Poly::zero();
            }
        }
        let g = p.primitive_x();
        (&c * &g).monic()
    }

    /// Product of the distinct irreducible factors, made monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return Poly::one();
        }
        let g = Poly::gcd(&Poly::gcd(self, &self.derive(Var::X)), &self.derive(Var::Y));
        self.exact_div(&g).unwrap().monic()
    }

    /// Integer-coefficient primitive representative with positive
    /// graded-lex leading coefficient. Useful as a canonical log argument.
    pub fn primitive_integer(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = num_integer::Integer::lcm(&l, c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let n = (c * BigRational::from_integer(l.clone())).to_integer();
            g = num_integer::Integer::gcd(&g, &n);
        }
        let mut s = BigRational::new(l, g);
        if self.lead_grlex().unwrap().1.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn size(&self) -> usize {
        self.terms
            .values()
            .map(|c| (c.numer().bits() + c.denom().bits()) as usize + 1)
            .sum()
    }
}

/// Polynomial in `x, y` through the given values at `y = y_i`, by Newton
/// divided differences.
fn interpolate_y(pts: &[(BigRational, Poly)]) -> Poly {
    let n = pts.len();
    let mut dd: Vec<Poly> = pts.iter().map(|(_, v)| v.clone()).collect();
    for k in 1..n {
        for i in (k..n).rev() {
            let step = (&pts[i].0 - &pts[i - k].0).recip();
            dd[i] = (&dd[i] - &dd[i - 1]).scale(&step);
        }
    }
    let mut h = dd[n - 1].clone();
    for i in (0..n - 1).rev() {
        let lin = &Poly::y() - &Poly::constant(pts[i].0.clone());
        h = &(&h * &lin) + &dd[i];
    }
    h
}

pub(crate) fn pow_rat(x: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.add_term(k, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (&(a, b), c) in &self.terms {
            for (&(i, j), d) in &o.terms {
                out.add_term((a + i, b + j), c * d);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
pub(crate) use owned_ops;
owned_ops!(Poly);

pub(crate) fn fmt_rat(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_mono(i: u32, j: u32) -> String {
    let mut parts = Vec::new();
    match i {
        0 => {}
        1 => parts.push("x".to_string()),
        _ => parts.push(format!("x^{i}")),
    }
    match j {
        0 => {}
        1 => parts.push("y".to_string()),
        _ => parts.push(format!("y^{j}")),
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(i, j)| std::cmp::Reverse((i + j, i)));
        let mut first = true;
        for (i, j) in keys {
            let c = &self.terms[&(i, j)];
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let m = fmt_mono(i, j);
            if m.is_empty() {
                write!(f, "{}", fmt_rat(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rat(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
