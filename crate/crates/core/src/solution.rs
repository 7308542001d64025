//! Closed-form solution expressions: linear combinations of an arbitrary
//! function `f(y)`, its derivatives and arbitrary constants, with
//! coefficients built from rational functions, logarithms, exponentials
//! of such, and unevaluated `x`-quadratures.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::diffop::{DiffOp, DiffOpError};
use crate::ratfield::{rat, rf_integrate, Poly, RatFunc, Var};

/// `exp(rat + Σ c_p log p + ∫ quad dx)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpPart {
    pub rat: RatFunc,
    pub logs: BTreeMap<Poly, RatFunc>,
    pub quad: Option<RatFunc>,
}

impl ExpPart {
    pub fn is_trivial(&self) -> bool {
        self.rat.is_zero() && self.logs.is_empty() && self.quad.is_none()
    }

    pub fn add(&self, o: &ExpPart) -> ExpPart {
        let mut logs = self.logs.clone();
        for (p, c) in &o.logs {
            let e = logs.entry(p.clone()).or_default();
            *e = &*e + c;
            if e.is_zero() {
                logs.remove(p);
            }
        }
        let quad = match (&self.quad, &o.quad) {
            (Some(a), Some(b)) => Some(a + b).filter(|q| !q.is_zero()),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        ExpPart {
            rat: &self.rat + &o.rat,
            logs,
            quad,
        }
    }

    pub fn neg(&self) -> ExpPart {
        ExpPart {
            rat: -&self.rat,
            logs: self.logs.iter().map(|(p, c)| (p.clone(), -c)).collect(),
            quad: self.quad.as_ref().map(|q| -q),
        }
    }

    /// Derivative of the exponent.
    fn derivative(&self, v: Var) -> Result<Scalar, DiffOpError> {
        let mut acc = Scalar::from_rat(self.rat.derive(v));
        for (p, c) in &self.logs {
            let pr = RatFunc::from_poly(p.clone());
            let dp = RatFunc::from_poly(p.derive(v));
            acc = acc.add(&Scalar::from_rat(c * &dp.checked_div(&pr).unwrap()));
            let dc = c.derive(v);
            if !dc.is_zero() {
                acc = acc.add(&Scalar::log(p.clone()).scale_rat(&dc));
            }
        }
        if let Some(q) = &self.quad {
            if v == Var::Y {
                return Err(DiffOpError::ApplyToResidual);
            }
            acc = acc.add(&Scalar::from_rat(q.clone()));
        }
        Ok(acc)
    }
}

/// Product `exp(E) · Π log(p)^n · Π (∫ r dx)^k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub exp: ExpPart,
    pub logs: BTreeMap<Poly, u32>,
    pub quads: BTreeMap<RatFunc, u32>,
}

impl Atom {
    pub fn is_one(&self) -> bool {
        self.exp.is_trivial() && self.logs.is_empty() && self.quads.is_empty()
    }

    fn mul(&self, o: &Atom) -> Atom {
        let mut logs = self.logs.clone();
        for (p, n) in &o.logs {
            *logs.entry(p.clone()).or_default() += n;
        }
        let mut quads = self.quads.clone();
        for (r, n) in &o.quads {
            *quads.entry(r.clone()).or_default() += n;
        }
        Atom {
            exp: self.exp.add(&o.exp),
            logs,
            quads,
        }
    }
}

/// Finite sum of `RatFunc · Atom`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: BTreeMap<Atom, RatFunc>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_rat(RatFunc::one())
    }

    pub fn from_rat(c: RatFunc) -> Self {
        let mut s = Scalar::zero();
        s.push(c, Atom::default());
        s
    }

    pub fn exp(e: ExpPart) -> Self {
        let mut s = Scalar::zero();
        s.push(
            RatFunc::one(),
            Atom {
                exp: e,
                ..Default::default()
            },
        );
        s
    }

    pub fn log(p: Poly) -> Self {
        let mut s = Scalar::zero();
        let mut logs = BTreeMap::new();
        logs.insert(p, 1);
        s.push(
            RatFunc::one(),
            Atom {
                logs,
                ..Default::default()
            },
        );
        s
    }

    pub fn quadrature(r: RatFunc) -> Self {
        let mut s = Scalar::zero();
        let mut quads = BTreeMap::new();
        quads.insert(r, 1);
        s.push(
            RatFunc::one(),
            Atom {
                quads,
                ..Default::default()
            },
        );
        s
    }

    /// Adds `c · a`, folding integer powers `exp(n log p)` into `c`.
    fn push(&mut self, mut c: RatFunc, mut a: Atom) {
        if c.is_zero() {
            return;
        }
        let ints: Vec<(Poly, i32)> = a
            .exp
            .logs
            .iter()
            .filter_map(|(p, k)| {
                let v = k.constant_value()?;
                if !v.is_integer() {
                    return None;
                }
                i32::try_from(v.to_integer()).ok().map(|n| (p.clone(), n))
            })
            .collect();
        for (p, n) in ints {
            a.exp.logs.remove(&p);
            c = &c * &RatFunc::from_poly(p).pow(n).unwrap();
        }
        let e = self.terms.entry(a.clone()).or_default();
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Atom, &RatFunc)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when no exponential, logarithm or quadrature occurs.
    pub fn as_rat(&self) -> Option<RatFunc> {
        match self.terms.len() {
            0 => Some(RatFunc::zero()),
            1 => {
                let (a, c) = self.terms.iter().next().unwrap();
                a.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn has_quadrature(&self) -> bool {
        self.terms.keys().any(|a| !a.quads.is_empty() || a.exp.quad.is_some())
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (a, c) in &o.terms {
            out.push(c.clone(), a.clone());
        }
        out
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn scale_rat(&self, k: &RatFunc) -> Scalar {
        if k.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                out.push(c * d, a.mul(b));
            }
        }
        out
    }

    pub fn derive(&self, v: Var) -> Result<Scalar, DiffOpError> {
        let mut out = Scalar::zero();
        for (a, c) in &self.terms {
            let single = {
                let mut s = Scalar::zero();
                s.push(c.clone(), a.clone());
                s
            };
            out.push(c.derive(v), a.clone());
            if !a.exp.is_trivial() {
                out = out.add(&a.exp.derivative(v)?.mul(&single));
            }
            for (p, &n) in &a.logs {
                let mut b = a.clone();
                if n == 1 {
                    b.logs.remove(p);
                } else {
                    b.logs.insert(p.clone(), n - 1);
                }
                let pr = RatFunc::from_poly(p.clone());
                let k = RatFunc::from_poly(p.derive(v)).checked_div(&pr).unwrap();
                out.push(&(c * &k) * &RatFunc::from_int(n as i64), b);
            }
            for (r, &n) in &a.quads {
                if v == Var::Y {
                    return Err(DiffOpError::ApplyToResidual);
                }
                let mut b = a.clone();
                if n == 1 {
                    b.quads.remove(r);
                } else {
                    b.quads.insert(r.clone(), n - 1);
                }
                out.push(&(c * r) * &RatFunc::from_int(n as i64), b);
            }
        }
        Ok(out)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self.derive(v) {
            Ok(d) => !d.is_zero(),
            Err(_) => true,
        }
    }

    /// Antiderivative when every term is rational; otherwise `None`.
    /// Non-elementary parts become quadrature atoms in `x`.
    pub fn integrate(&self, v: Var) -> Option<Scalar> {
        let mut out = Scalar::zero();
        for (a, c) in &self.terms {
            if !a.is_one() {
                return None;
            }
            let r = rf_integrate(c, v);
            out = out.add(&Scalar::from_rat(r.rational_part.clone()));
            for (k, p) in &r.log_terms {
                out = out.add(&Scalar::log(p.clone()).scale_rat(k));
            }
            if let Some(res) = r.residual {
                if v == Var::Y {
                    return None;
                }
                out = out.add(&Scalar::quadrature(res));
            }
        }
        Some(out)
    }

    pub fn to_tree(&self) -> ExprNode {
        let parts: Vec<ExprNode> = self.terms.iter().rev().map(|(a, c)| atom_tree(c, a)).collect();
        match parts.len() {
            0 => ExprNode::Rat(RatFunc::zero()),
            1 => parts.into_iter().next().unwrap(),
            _ => ExprNode::Sum(parts),
        }
    }
}

fn atom_tree(c: &RatFunc, a: &Atom) -> ExprNode {
    let mut f = Vec::new();
    if !c.is_one() || a.is_one() {
        f.push(ExprNode::Rat(c.clone()));
    }
    if !a.exp.is_trivial() {
        let mut e = Vec::new();
        if !a.exp.rat.is_zero() {
            e.push(ExprNode::Rat(a.exp.rat.clone()));
        }
        for (p, k) in &a.exp.logs {
            e.push(ExprNode::Product(vec![
                ExprNode::Rat(k.clone()),
                ExprNode::Log(p.clone()),
            ]));
        }
        if let Some(q) = &a.exp.quad {
            e.push(ExprNode::Quadrature {
                integrand: q.clone(),
                var: Var::X,
            });
        }
        let inner = if e.len() == 1 {
            e.pop().unwrap()
        } else {
            ExprNode::Sum(e)
        };
        f.push(ExprNode::Exp(Box::new(inner)));
    }
    for (p, &n) in &a.logs {
        for _ in 0..n {
            f.push(ExprNode::Log(p.clone()));
        }
    }
    for (r, &n) in &a.quads {
        for _ in 0..n {
            f.push(ExprNode::Quadrature {
                integrand: r.clone(),
                var: Var::X,
            });
        }
    }
    if f.len() == 1 {
        f.pop().unwrap()
    } else {
        ExprNode::Product(f)
    }
}

/// Rendering tree for solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprNode {
    Sum(Vec<ExprNode>),
    Product(Vec<ExprNode>),
    Rat(RatFunc),
    /// `name^(deriv)(y)`.
    Function {
        name: String,
        deriv: u32,
    },
    Constant(usize),
    Exp(Box<ExprNode>),
    Log(Poly),
    Quadrature {
        integrand: RatFunc,
        var: Var,
    },
}

fn prime_suffix(n: u32) -> String {
    if n <= 3 {
        "'".repeat(n as usize)
    } else {
        format!("^({n})")
    }
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Sum(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    let s = p.to_string();
                    if i == 0 {
                        write!(f, "{s}")?;
                    } else if let Some(r) = s.strip_prefix('-') {
                        write!(f, " - {r}")?;
                    } else {
                        write!(f, " + {s}")?;
                    }
                }
                Ok(())
            }
            ExprNode::Product(parts) => {
                let mut out = Vec::new();
                let mut neg = false;
                for (i, p) in parts.iter().enumerate() {
                    let mut s = p.to_string();
                    if i == 0 && s == "-1" {
                        neg = true;
                        continue;
                    }
                    if i == 0 {
                        if let Some(r) = s.strip_prefix('-') {
                            if !matches!(p, ExprNode::Rat(c) if c.num().len() > 1) {
                                neg = true;
                                s = r.to_string();
                            }
                        }
                    }
                    let wrap = matches!(p, ExprNode::Sum(_))
                        || matches!(p, ExprNode::Rat(c) if c.num().len() > 1 || !c.den().is_one());
                    out.push(if wrap && parts.len() > 1 { format!("({s})") } else { s });
                }
                write!(f, "{}{}", if neg { "-" } else { "" }, out.join("*"))
            }
            ExprNode::Rat(c) => write!(f, "{c}"),
            ExprNode::Function { name, deriv } => write!(f, "{name}{}(y)", prime_suffix(*deriv)),
            ExprNode::Constant(k) => write!(f, "C{}", k + 1),
            ExprNode::Exp(e) => write!(f, "exp({e})"),
            ExprNode::Log(p) => write!(f, "log({p})"),
            ExprNode::Quadrature { integrand, var } => {
                let v = if *var == Var::X { "x" } else { "y" };
                write!(f, "Int({integrand}, {v})")
            }
        }
    }
}

/// `Σ_j s_j f^(j)(y) + Σ_k c_k C_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionExpr {
    pub f: BTreeMap<u32, Scalar>,
    pub consts: Vec<Scalar>,
}

impl SolutionExpr {
    pub fn zero() -> Self {
        SolutionExpr::default()
    }

    /// `s · f(y)`.
    pub fn function(s: Scalar) -> Self {
        let mut e = SolutionExpr::zero();
        if !s.is_zero() {
            e.f.insert(0, s);
        }
        e
    }

    /// `s · C` for a fresh constant `C`.
    pub fn constant(s: Scalar) -> Self {
        SolutionExpr {
            f: BTreeMap::new(),
            consts: vec![s],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_empty() && self.consts.iter().all(Scalar::is_zero)
    }

    /// Highest derivative of `f` that occurs.
    pub fn q(&self) -> Option<u32> {
        self.f.keys().next_back().copied()
    }

    pub fn num_constants(&self) -> usize {
        self.consts.len()
    }

    pub(crate) fn put(&mut self, j: u32, s: Scalar) {
        if s.is_zero() {
            return;
        }
        let e = self.f.entry(j).or_default();
        *e = e.add(&s);
        if e.is_zero() {
            self.f.remove(&j);
        }
    }

    /// Sum, with constants of `o` kept distinct from those of `self`
    /// unless `shared` is set, in which case they are identified by index.
    pub fn add(&self, o: &SolutionExpr, shared: bool) -> SolutionExpr {
        let mut out = self.clone();
        for (j, s) in &o.f {
            out.put(*j, s.clone());
        }
        if shared {
            for (k, c) in o.consts.iter().enumerate() {
                if k < out.consts.len() {
                    out.consts[k] = out.consts[k].add(c);
                } else {
                    out.consts.push(c.clone());
                }
            }
        } else {
            out.consts.extend(o.consts.iter().cloned());
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> SolutionExpr {
        let mut out = SolutionExpr::zero();
        for (j, c) in &self.f {
            out.put(*j, c.mul(s));
        }
        out.consts = self.consts.iter().map(|c| c.mul(s)).collect();
        out
    }

    pub fn derive(&self, v: Var) -> Result<SolutionExpr, DiffOpError> {
        let mut out = SolutionExpr::zero();
        for (j, c) in &self.f {
            out.put(*j, c.derive(v)?);
            if v == Var::Y {
                out.put(j + 1, c.clone());
            }
        }
        out.consts = self.consts.iter().map(|c| c.derive(v)).collect::<Result<_, _>>()?;
        Ok(out)
    }

    /// Applies `Σ c_m ∂^m` termwise, with `∂x f(y) = 0`.
    pub fn apply(&self, op: &DiffOp) -> Result<SolutionExpr, DiffOpError> {
        let mut out = SolutionExpr {
            f: BTreeMap::new(),
            consts: vec![Scalar::zero(); self.consts.len()],
        };
        let mut memo: BTreeMap<(u32, u32), SolutionExpr> = BTreeMap::new();
        memo.insert((0, 0), self.clone());
        for (m, c) in op.terms() {
            let d = derivative_memo(&mut memo, m.dx, m.dy)?;
            out = out.add(&d.scale(&Scalar::from_rat(c.clone())), true);
        }
        Ok(out)
    }

    /// True when no coefficient depends on `v`.
    pub fn free_of(&self, v: Var) -> bool {
        self.f.values().chain(self.consts.iter()).all(|s| !s.depends_on(v))
    }

    /// Substitutes `f = (1/γ) g'` with `γ = γ(y)`; the result is written in
    /// terms of `g` under the same name.
    pub fn reparametrize(&self, gamma: &RatFunc) -> SolutionExpr {
        let inv = gamma.inv().expect("nonzero");
        let mut derivs = vec![inv.clone()];
        let top = self.q().unwrap_or(0);
        for _ in 0..top {
            let d = derivs.last().unwrap().derive(Var::Y);
            derivs.push(d);
        }
        let mut out = SolutionExpr {
            f: BTreeMap::new(),
            consts: self.consts.clone(),
        };
        for (&i, s) in &self.f {
            // f^(i) = Σ_m C(i, m) (1/γ)^(i-m) g^(m+1)
            let mut b = rat(1);
            for m in 0..=i {
                if m > 0 {
                    b = b * rat((i - m + 1) as i64) / rat(m as i64);
                }
                let k = derivs[(i - m) as usize].scale(&b);
                out.put(m + 1, s.scale_rat(&k));
            }
        }
        out
    }

    /// Fixes the free numeric scale of `f` and of each constant: the
    /// numerators of all coefficients of `f` become coprime integers with
    /// the lowest derivative's leading coefficient positive, and each
    /// constant's last coefficient gets leading coefficient one.
    pub fn normalize(&mut self) {
        let coeffs: Vec<&RatFunc> = self.f.values().flat_map(|s| s.terms().map(|(_, c)| c)).collect();
        if let Some(k) = numeric_content(&coeffs) {
            let mut k = k;
            let low = self
                .f
                .values()
                .next()
                .and_then(|s| s.terms().last().map(|(_, c)| c.clone()));
            if let Some((_, lc)) = low.as_ref().and_then(|c| c.num().lead_grlex()) {
                if lc.is_negative() {
                    k = -k;
                }
            }
            let inv = RatFunc::constant(k.recip());
            let f = std::mem::take(&mut self.f);
            for (j, s) in f {
                self.put(j, s.scale_rat(&inv));
            }
        }
        for c in &mut self.consts {
            let Some((_, k)) = c.terms().last() else { continue };
            let Some((_, lc)) = k.num().lead_grlex() else { continue };
            let s = RatFunc::constant(lc.recip());
            *c = c.scale_rat(&s);
        }
    }

    pub fn to_tree(&self, name: &str) -> ExprNode {
        let mut parts = Vec::new();
        for (j, s) in self.f.iter().rev() {
            parts.push(times(
                s,
                ExprNode::Function {
                    name: name.into(),
                    deriv: *j,
                },
            ));
        }
        for (k, s) in self.consts.iter().enumerate() {
            if !s.is_zero() {
                parts.push(times(s, ExprNode::Constant(k)));
            }
        }
        match parts.len() {
            0 => ExprNode::Rat(RatFunc::zero()),
            1 => parts.pop().unwrap(),
            _ => ExprNode::Sum(parts),
        }
    }

    pub fn render(&self, name: &str) -> String {
        self.to_tree(name).to_string()
    }

    pub fn has_quadrature(&self) -> bool {
        self.f.values().chain(self.consts.iter()).any(Scalar::has_quadrature)
    }
}

/// `gcd(numerators) / lcm(denominators)` over all numerator coefficients.
fn numeric_content(cs: &[&RatFunc]) -> Option<BigRational> {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for c in cs {
        for (_, v) in c.num().terms() {
            g = g.gcd(v.numer());
            l = l.lcm(v.denom());
        }
    }
    (!g.is_zero()).then(|| BigRational::new(g, l))
}

fn times(s: &Scalar, leaf: ExprNode) -> ExprNode {
    if let Some(r) = s.as_rat() {
        if r.is_one() {
            return leaf;
        }
    }
    let t = s.to_tree();
    ExprNode::Product(vec![t, leaf])
}

fn derivative_memo(memo: &mut BTreeMap<(u32, u32), SolutionExpr>, a: u32, b: u32) -> Result<SolutionExpr, DiffOpError> {
    if let Some(v) = memo.get(&(a, b)) {
        return Ok(v.clone());
    }
    let v = if a > 0 {
        derivative_memo(memo, a - 1, b)?.derive(Var::X)?
    } else {
        derivative_memo(memo, 0, b - 1)?.derive(Var::Y)?
    };
    memo.insert((a, b), v.clone());
    Ok(v)
}

pub fn op_apply(a: &DiffOp, e: &SolutionExpr) -> Result<SolutionExpr, DiffOpError> {
    e.apply(a)
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        Scalar::add(&self, &o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_operator, parse_ratfunc};

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    #[test]
    fn exponential_derivative() {
        // d/dx exp(x*y) = y exp(x*y)
        let e = Scalar::exp(ExpPart {
            rat: rf("x*y"),
            ..Default::default()
        });
        let d = e.derive(Var::X).unwrap();
        assert_eq!(d, e.scale_rat(&rf("y")));
    }

    #[test]
    fn integer_log_powers_fold_into_coefficient() {
        let mut logs = BTreeMap::new();
        logs.insert(rf("x + y").num().clone(), RatFunc::from_int(-2));
        let e = Scalar::exp(ExpPart {
            logs,
            ..Default::default()
        });
        assert_eq!(e.as_rat(), Some(rf("1/(x + y)^2")));
    }

    #[test]
    fn apply_to_arbitrary_function() {
        // (Dy - x*Dx) [x f(y)] = x f'(y) - x f(y)
        let u = SolutionExpr::function(Scalar::from_rat(rf("x")));
        let op = parse_operator("Dy - x*Dx").unwrap();
        let r = u.apply(&op).unwrap();
        assert_eq!(r.render("f"), "x*f'(y) - x*f(y)");
    }

    #[test]
    fn reparametrization_keeps_function() {
        // f = g'/y, then y f = g'
        let u = SolutionExpr::function(Scalar::from_rat(rf("y")));
        let r = u.reparametrize(&rf("y"));
        assert_eq!(r.render("f"), "f'(y)");
    }
}
