//! Univariate polynomials with coefficients in `Q(x, y)`. Used with
//! coefficients free of the main variable, i.e. as `Q(y)[x]` or `Q(y)[z]`.

use super::poly::{Poly, Var};
use super::ratfunc::RatFunc;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UPoly {
    c: Vec<RatFunc>,
}

impl UPoly {
    pub fn new(mut c: Vec<RatFunc>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: vec![] }
    }

    pub fn constant(v: RatFunc) -> Self {
        UPoly::new(vec![v])
    }

    /// The main variable itself.
    pub fn t() -> Self {
        UPoly::new(vec![RatFunc::zero(), RatFunc::one()])
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lc(&self) -> RatFunc {
        self.c.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.c.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn scale(&self, k: &RatFunc) -> UPoly {
        UPoly::new(self.c.iter().map(|v| v * k).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![RatFunc::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::new(out)
    }

    pub fn shift(&self, k: usize) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![RatFunc::zero(); k];
        c.extend(self.c.iter().cloned());
        UPoly::new(c)
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, v)| v.scale(&super::poly::rat(i as i64)))
                .collect(),
        )
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let inv = self.lc().inv().unwrap();
        self.scale(&inv)
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dinv = d.lc().inv().unwrap();
        let dd = d.degree();
        let mut r = self.clone();
        let mut q = vec![RatFunc::zero(); (self.degree() - dd + 1).max(0) as usize];
        while !r.is_zero() && r.degree() >= dd {
            let k = (r.degree() - dd) as usize;
            let f = &r.lc() * &dinv;
            q[k] = f.clone();
            r = r.sub(&d.scale(&f).shift(k));
        }
        (UPoly::new(q), r)
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    pub fn gcd(a: &UPoly, b: &UPoly) -> UPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Solves `s*a + t*b = c` with `deg s < deg b`, assuming `gcd(a, b) = 1`.
    pub fn diophantine(a: &UPoly, b: &UPoly, c: &UPoly) -> Option<(UPoly, UPoly)> {
        // Extended Euclid for s0*a + t0*b = g.
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (UPoly::constant(RatFunc::one()), UPoly::zero());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        if r0.degree() != 0 {
            return None;
        }
        let ginv = r0.lc().inv().unwrap();
        let s = s0.scale(&ginv).mul(c);
        let s = s.rem(b);
        // t = (c - s a) / b
        let t = c.sub(&s.mul(a));
        let (t, rem) = t.divrem(b);
        debug_assert!(rem.is_zero());
        Some((s, t))
    }

    /// Resultant over a field, by the Euclidean remainder sequence.
    pub fn resultant(a: &UPoly, b: &UPoly) -> RatFunc {
        if a.is_zero() || b.is_zero() {
            return RatFunc::zero();
        }
        let (m, n) = (a.degree(), b.degree());
        if n == 0 {
            return b.lc().pow(m as i32).unwrap();
        }
        if m == 0 {
            return a.lc().pow(n as i32).unwrap();
        }
        let r = a.rem(b);
        if r.is_zero() {
            return RatFunc::zero();
        }
        let sign = if (m * n) % 2 == 1 { -1 } else { 1 };
        let k = m - r.degree();
        let lc = b.lc().pow(k as i32).unwrap();
        &(&lc * &UPoly::resultant(b, &r)) * &RatFunc::from_int(sign)
    }

    /// Square-free decomposition (Yun): returns `[f_1, f_2, ...]` with
    /// `self = lc * prod f_i^i`, each `f_i` monic.
    pub fn squarefree(&self) -> Vec<UPoly> {
        let f = self.monic();
        let fp = f.derivative();
        let a0 = UPoly::gcd(&f, &fp);
        let mut b = f.divrem(&a0).0;
        let mut c = fp.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        while b.degree() > 0 {
            let a = UPoly::gcd(&b, &d);
            out.push(a.clone());
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
        }
        while out.last().is_some_and(|p| p.degree() == 0) {
            out.pop();
        }
        out
    }

    pub fn eval(&self, v: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * v) + c;
        }
        acc
    }

    /// Interprets the main variable as `x` and rebuilds an element of `Q(x, y)`.
    pub fn to_ratfunc(&self) -> RatFunc {
        self.eval(&RatFunc::x())
    }

    /// Splits `p(x, y)` as a polynomial in `x` over `Q(y)`.
    pub fn from_poly_x(p: &Poly) -> UPoly {
        UPoly::new(p.x_coeffs().into_iter().map(RatFunc::from_poly).collect())
    }

    /// Clears denominators and returns a polynomial in `Q[x, y]` with the
    /// same roots in `x`.
    pub fn to_poly_x(&self) -> Poly {
        let mut l = Poly::one();
        for c in &self.c {
            let d = c.den();
            let g = Poly::gcd(&l, d);
            l = &l * &d.exact_div(&g).unwrap();
        }
        let lr = RatFunc::from_poly(l);
        let mut coeffs = Vec::new();
        for c in &self.c {
            let v = c * &lr;
            debug_assert!(v.is_poly());
            coeffs.push(v.num().clone());
        }
        let p = Poly::from_x_coeffs(&coeffs);
        let cont = p.content_x();
        p.exact_div(&cont).unwrap().monic()
    }

    pub fn depends_on_main_free(&self) -> bool {
        self.c.iter().all(|v| !v.depends_on(Var::X))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(v: &[i64]) -> UPoly {
        UPoly::new(v.iter().map(|&n| RatFunc::from_int(n)).collect())
    }

    #[test]
    fn yun_splits_powers() {
        // (t-1)^2 (t+2)
        let f = up(&[-1, 1]).mul(&up(&[-1, 1])).mul(&up(&[2, 1]));
        let sq = f.squarefree();
        assert_eq!(sq.len(), 2);
        assert_eq!(sq[0], up(&[2, 1]));
        assert_eq!(sq[1], up(&[-1, 1]));
    }

    #[test]
    fn resultant_detects_common_root() {
        let a = up(&[-1, 1]).mul(&up(&[3, 1]));
        let b = up(&[-1, 1]).mul(&up(&[5, 1]));
        assert!(UPoly::resultant(&a, &b).is_zero());
        // res(t - 1, t - 2) = -1
        assert_eq!(UPoly::resultant(&up(&[-1, 1]), &up(&[-2, 1])), RatFunc::from_int(-1));
    }

    #[test]
    fn diophantine_solves() {
        let a = up(&[1, 0, 1]);
        let b = up(&[-1, 1]);
        let c = up(&[0, 0, 3]);
        let (s, t) = UPoly::diophantine(&a, &b, &c).unwrap();
        assert_eq!(s.mul(&a).add(&t.mul(&b)), c);
        assert!(s.degree() < b.degree());
    }
}
