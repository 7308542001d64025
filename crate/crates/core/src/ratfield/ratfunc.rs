use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{owned_ops, rat, Poly, Var};
use super::RatError;

/// Element of `Q(x, y)` in canonical form: coprime numerator and
/// denominator, denominator with graded-lex leading coefficient one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc::from_poly(Poly::from_int(n))
    }

    pub fn constant(c: BigRational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn y() -> Self {
        RatFunc::from_poly(Poly::y())
    }

    pub fn var(v: Var) -> Self {
        RatFunc::from_poly(Poly::var(v))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self, RatError> {
        if den.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(RatFunc::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        RatFunc::scaled(num, den)
    }

    /// Makes the denominator monic; assumes coprime inputs.
    fn scaled(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let lc = den.lead_grlex().unwrap().1.clone();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.depends_on(v) || self.den.depends_on(v)
    }

    pub fn scale(&self, c: &BigRational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc, RatError> {
        if self.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(RatFunc::scaled(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &RatFunc) -> Result<RatFunc, RatError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, n: i32) -> Result<RatFunc, RatError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let n = n as u32;
        Ok(RatFunc {
            num: self.num.pow(n),
            den: self.den.pow(n),
        })
    }

    pub fn derive(&self, v: Var) -> RatFunc {
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derive(v));
        }
        // (n/d)' = (n' d - n d') / d^2, with the common factor of d removed early.
        let dd = self.den.derive(v);
        let g = Poly::gcd(&self.den, &dd);
        let d_over_g = self.den.exact_div(&g).unwrap();
        let dd_over_g = dd.exact_div(&g).unwrap();
        let num = &(&self.num.derive(v) * &d_over_g) - &(&self.num * &dd_over_g);
        let den = &self.den * &d_over_g;
        RatFunc::normalized(num, den)
    }

    pub fn derive_n(&self, v: Var, n: u32) -> RatFunc {
        let mut r = self.clone();
        for _ in 0..n {
            r = r.derive(v);
        }
        r
    }

    pub fn swap_vars(&self) -> RatFunc {
        RatFunc::normalized(self.num.swap_vars(), self.den.swap_vars())
    }

    pub fn subs(&self, v: Var, val: &BigRational) -> Result<RatFunc, RatError> {
        RatFunc::new(self.num.subs(v, val), self.den.subs(v, val))
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> Result<BigRational, RatError> {
        let d = self.den.eval(x, y);
        if d.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(self.num.eval(x, y) / d)
    }

    /// Rough measure of expression size, used to choose cheap pivots.
    pub fn size(&self) -> usize {
        self.num.size() + self.den.size()
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl From<i64> for RatFunc {
    fn from(n: i64) -> Self {
        RatFunc::from_int(n)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = &self.num + &o.num;
            if self.den.is_one() {
                return RatFunc::from_poly(num);
            }
            return RatFunc::normalized(num, self.den.clone());
        }
        if self.den.is_one() {
            return RatFunc::scaled(&(&self.num * &o.den) + &o.num, o.den.clone());
        }
        if o.den.is_one() {
            return RatFunc::scaled(&(&o.num * &self.den) + &self.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &o.den);
        let a = self.den.exact_div(&g).unwrap();
        let b = o.den.exact_div(&g).unwrap();
        let num = &(&self.num * &b) + &(&o.num * &a);
        let den = &self.den * &b;
        if g.is_one() {
            RatFunc::scaled(num, den)
        } else {
            RatFunc::normalized(num, den)
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        let g1 = Poly::gcd(&self.num, &o.den);
        let g2 = Poly::gcd(&o.num, &self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), o.den.clone())
        } else {
            (self.num.exact_div(&g1).unwrap(), o.den.exact_div(&g1).unwrap())
        };
        let (c, b) = if g2.is_one() {
            (o.num.clone(), self.den.clone())
        } else {
            (o.num.exact_div(&g2).unwrap(), self.den.exact_div(&g2).unwrap())
        };
        RatFunc::scaled(&a * &c, &b * &d)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

owned_ops!(RatFunc);

/// The four field operations, with division reporting a zero divisor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rf_arith(op: ArithOp, a: &RatFunc, b: &RatFunc) -> Result<RatFunc, RatError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

pub fn rf_derive(a: &RatFunc, v: Var) -> RatFunc {
    a.derive(v)
}

fn needs_parens(p: &Poly) -> bool {
    p.len() > 1
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        // Clear coefficient denominators so both sides print with integers.
        let mut l = num_bigint::BigInt::one();
        for p in [&self.num, &self.den] {
            for (_, c) in p.terms() {
                l = num_integer::Integer::lcm(&l, c.denom());
            }
        }
        let s = BigRational::from_integer(l);
        let (num, den) = (self.num.scale(&s), self.den.scale(&s));
        let n = if needs_parens(&num) {
            format!("({num})")
        } else {
            num.to_string()
        };
        let d = if needs_parens(&den) || den.to_string().contains('*') {
            format!("({den})")
        } else {
            den.to_string()
        };
        write!(f, "{n}/{d}")
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl RatFunc {
    pub fn from_ratio(n: i64, d: i64) -> RatFunc {
        RatFunc::constant(rat(n) / rat(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancels_common_factor() {
        let x = RatFunc::x();
        let y = RatFunc::y();
        let a = (&x * &y).checked_div(&(&x * &x)).unwrap();
        assert_eq!(a, y.checked_div(&x).unwrap());
    }

    #[test]
    fn derivative_of_quotient() {
        let x = RatFunc::x();
        let inv = x.inv().unwrap();
        let d = inv.derive(Var::X);
        assert_eq!(d, (&x * &x).inv().unwrap().scale(&rat(-1)));
    }

    #[test]
    fn display_rational_constant_denominator() {
        let y = RatFunc::y();
        let a = y.scale(&(rat(1) / rat(9)));
        assert_eq!(a.to_string(), "1/9*y");
        let b = RatFunc::one().checked_div(&(&y * &y).scale(&rat(9))).unwrap();
        assert_eq!(b.to_string(), "1/(9*y^2)");
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            RatFunc::one().checked_div(&RatFunc::zero()),
            Err(RatError::DivisionByZero)
        );
    }
}
