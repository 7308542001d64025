//! Linear differential operators `Σ c_{ij} ∂x^i ∂y^j` with coefficients in
//! `Q(x, y)` written on the left, and their symbols.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ratfield::{rat, RatError, RatFunc, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffOpError {
    #[error("gauge factor is zero")]
    ZeroGauge,
    #[error("cannot apply an operator to an unevaluated quadrature in y")]
    ApplyToResidual,
    #[error(transparent)]
    Rat(#[from] RatError),
}

/// Derivative multi-index `∂x^dx ∂y^dy`. Ordered by total degree, then by
/// the power of `∂y`, then by the power of `∂x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono {
    pub dx: u32,
    pub dy: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { dx: 0, dy: 0 };

    pub fn new(dx: u32, dy: u32) -> Self {
        Mono { dx, dy }
    }

    pub fn degree(self) -> u32 {
        self.dx + self.dy
    }

    pub fn divides(self, o: Mono) -> bool {
        self.dx <= o.dx && self.dy <= o.dy
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, o: Mono) -> Mono {
        Mono::new(self.dx - o.dx, self.dy - o.dy)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Mono) -> Mono {
        Mono::new(self.dx + o.dx, self.dy + o.dy)
    }

    pub fn lcm(self, o: Mono) -> Mono {
        Mono::new(self.dx.max(o.dx), self.dy.max(o.dy))
    }

    /// All monomials of exactly degree `k`, ascending in the term order.
    pub fn of_degree(k: u32) -> impl Iterator<Item = Mono> {
        (0..=k).map(move |j| Mono::new(k - j, j))
    }

    /// All monomials of degree at most `k`, ascending in the term order.
    pub fn up_to(k: u32) -> impl Iterator<Item = Mono> {
        (0..=k).flat_map(Mono::of_degree)
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.degree(), self.dy, self.dx).cmp(&(o.degree(), o.dy, o.dx))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.dx {
            0 => {}
            1 => parts.push("Dx".to_string()),
            n => parts.push(format!("Dx^{n}")),
        }
        match self.dy {
            0 => {}
            1 => parts.push("Dy".to_string()),
            n => parts.push(format!("Dy^{n}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

fn binom(n: u32, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc = acc * rat(i64::from(n - i)) / rat(i64::from(i + 1));
    }
    acc
}

/// Derivatives `∂x^a ∂y^b c` memoized per coefficient.
struct DerivCache<'a> {
    base: &'a RatFunc,
    memo: HashMap<(u32, u32), RatFunc>,
}

impl<'a> DerivCache<'a> {
    fn new(base: &'a RatFunc) -> Self {
        DerivCache {
            base,
            memo: HashMap::new(),
        }
    }

    fn get(&mut self, a: u32, b: u32) -> RatFunc {
        if a == 0 && b == 0 {
            return self.base.clone();
        }
        if let Some(v) = self.memo.get(&(a, b)) {
            return v.clone();
        }
        let v = if a > 0 {
            self.get(a - 1, b).derive(Var::X)
        } else {
            self.get(0, b - 1).derive(Var::Y)
        };
        self.memo.insert((a, b), v.clone());
        v
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffOp {
    terms: BTreeMap<Mono, RatFunc>,
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn one() -> Self {
        DiffOp::from_fn(RatFunc::one())
    }

    pub fn from_fn(c: RatFunc) -> Self {
        DiffOp::term(c, 0, 0)
    }

    pub fn dx() -> Self {
        DiffOp::term(RatFunc::one(), 1, 0)
    }

    pub fn dy() -> Self {
        DiffOp::term(RatFunc::one(), 0, 1)
    }

    pub fn monomial(m: Mono) -> Self {
        DiffOp::term(RatFunc::one(), m.dx, m.dy)
    }

    pub fn term(c: RatFunc, dx: u32, dy: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::new(dx, dy), c);
        }
        DiffOp { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, RatFunc)>>(it: I) -> Self {
        let mut d = DiffOp::zero();
        for (m, c) in it {
            d.add_term(m, &c);
        }
        d
    }

    pub fn add_term(&mut self, m: Mono, c: &RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &RatFunc)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Mono) -> RatFunc {
        self.terms.get(&m).cloned().unwrap_or_default()
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

    pub fn order(&self) -> Option<u32> {
        self.lm().map(Mono::degree)
    }

    pub fn lm(&self) -> Option<Mono> {
        self.terms.keys().next_back().copied()
    }

    pub fn lc(&self) -> Option<&RatFunc> {
        self.terms.values().next_back()
    }

    pub fn remove(&mut self, m: Mono) -> Option<RatFunc> {
        self.terms.remove(&m)
    }

    /// Left multiplication by a function.
    pub fn scale(&self, c: &RatFunc) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero();
        }
        DiffOp {
            terms: self.terms.iter().map(|(&m, v)| (m, v * c)).collect(),
        }
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> DiffOp {
        match self.lc() {
            None => DiffOp::zero(),
            Some(c) if c.is_one() => self.clone(),
            Some(c) => self.scale(&c.inv().unwrap()),
        }
    }

    pub fn add(&self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (&m, c) in &o.terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (&m, c) in &o.terms {
            out.add_term(m, &-c);
        }
        out
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp {
            terms: self.terms.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }

    /// `self - c * other` in place.
    pub fn sub_scaled(&mut self, c: &RatFunc, o: &DiffOp) {
        for (&m, v) in &o.terms {
            self.add_term(m, &-(c * v));
        }
    }

    /// Composition `self ∘ o` by the Leibniz rule.
    pub fn mul(&self, o: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        let mut caches: Vec<(Mono, DerivCache)> = o.terms.iter().map(|(&m, c)| (m, DerivCache::new(c))).collect();
        for (&a, c) in &self.terms {
            for (b, cache) in caches.iter_mut() {
                for g1 in 0..=a.dx {
                    let b1 = binom(a.dx, g1);
                    for g2 in 0..=a.dy {
                        let d = cache.get(g1, g2);
                        if d.is_zero() {
                            continue;
                        }
                        let k = &b1 * &binom(a.dy, g2);
                        let coef = (c * &d).scale(&k);
                        let m = Mono::new(a.dx - g1 + b.dx, a.dy - g2 + b.dy);
                        out.add_term(m, &coef);
                    }
                }
            }
        }
        out
    }

    /// `∂^m ∘ self`.
    pub fn mul_left_mono(&self, m: Mono) -> DiffOp {
        if m == Mono::ONE {
            return self.clone();
        }
        DiffOp::monomial(m).mul(self)
    }

    /// Applies the operator to a function.
    pub fn apply(&self, g: &RatFunc) -> RatFunc {
        let mut cache = DerivCache::new(g);
        let mut acc = RatFunc::zero();
        for (&m, c) in &self.terms {
            acc = &acc + &(c * &cache.get(m.dx, m.dy));
        }
        acc
    }

    pub fn max_order_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|m| if v == Var::X { m.dx } else { m.dy })
            .max()
            .unwrap_or(0)
    }

    /// Leading form: coefficients of the top-order terms as a binary form in
    /// `ξ` (for `∂x`) and `η` (for `∂y`).
    pub fn principal_symbol(&self) -> BinaryForm {
        let Some(k) = self.order() else {
            return BinaryForm::zero(0);
        };
        let mut f = BinaryForm::zero(k);
        for (m, c) in &self.terms {
            if m.degree() == k {
                f.coeffs[m.dx as usize] = c.clone();
            }
        }
        f
    }

    /// Swaps the roles of `x` and `y` in both coefficients and derivatives.
    pub fn swap_vars(&self) -> DiffOp {
        DiffOp {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Mono::new(m.dy, m.dx), c.swap_vars()))
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.terms.values().map(RatFunc::size).sum()
    }
}

pub fn op_mul(a: &DiffOp, b: &DiffOp) -> DiffOp {
    a.mul(b)
}

/// `σ^{-1} ∘ a ∘ σ`.
pub fn conjugate(a: &DiffOp, sigma: &RatFunc) -> Result<DiffOp, DiffOpError> {
    if sigma.is_zero() {
        return Err(DiffOpError::ZeroGauge);
    }
    let inv = sigma.inv()?;
    Ok(a.mul(&DiffOp::from_fn(sigma.clone())).scale(&inv))
}

/// Gauge-shifted derivations `X = ∂x + a`, `Y = ∂y + b`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Frame {
    pub a: RatFunc,
    pub b: RatFunc,
}

impl Frame {
    pub fn plain() -> Self {
        Frame::default()
    }

    pub fn new(a: RatFunc, b: RatFunc) -> Self {
        Frame { a, b }
    }

    pub fn x_op(&self) -> DiffOp {
        DiffOp::dx().add(&DiffOp::from_fn(self.a.clone()))
    }

    pub fn y_op(&self) -> DiffOp {
        DiffOp::dy().add(&DiffOp::from_fn(self.b.clone()))
    }

    /// Expands `Y^j X^i` in plain derivatives.
    pub fn word(&self, j: u32, i: u32) -> DiffOp {
        let mut acc = DiffOp::one();
        let x = self.x_op();
        let y = self.y_op();
        for _ in 0..i {
            acc = x.mul(&acc);
        }
        for _ in 0..j {
            acc = y.mul(&acc);
        }
        acc
    }
}

/// Coefficients of an operator in the ordered words `Y^j X^i`, keyed by
/// `(j, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Framed {
    pub coeffs: BTreeMap<(u32, u32), RatFunc>,
}

impl Framed {
    pub fn get(&self, j: u32, i: u32) -> RatFunc {
        self.coeffs.get(&(j, i)).cloned().unwrap_or_default()
    }
}

pub fn rewrite_in_frame(a: &DiffOp, fr: &Frame) -> Framed {
    let mut words: HashMap<Mono, DiffOp> = HashMap::new();
    let mut rem = a.clone();
    let mut out = Framed::default();
    while let Some(m) = rem.lm() {
        let c = rem.coeff(m);
        let w = words.entry(m).or_insert_with(|| fr.word(m.dy, m.dx));
        rem.sub_scaled(&c, w);
        out.coeffs.insert((m.dy, m.dx), c);
    }
    out
}

pub fn from_framed(f: &Framed, fr: &Frame) -> DiffOp {
    let mut acc = DiffOp::zero();
    for (&(j, i), c) in &f.coeffs {
        acc = acc.add(&fr.word(j, i).scale(c));
    }
    acc
}

/// Homogeneous form `Σ c_k ξ^k η^(d-k)` over `Q(x, y)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryForm {
    pub degree: u32,
    /// `coeffs[k]` multiplies `ξ^k η^(degree-k)`.
    pub coeffs: Vec<RatFunc>,
}

impl BinaryForm {
    pub fn zero(degree: u32) -> Self {
        BinaryForm {
            degree,
            coeffs: vec![RatFunc::zero(); degree as usize + 1],
        }
    }

    pub fn xi() -> Self {
        BinaryForm {
            degree: 1,
            coeffs: vec![RatFunc::zero(), RatFunc::one()],
        }
    }

    pub fn eta() -> Self {
        BinaryForm {
            degree: 1,
            coeffs: vec![RatFunc::one(), RatFunc::zero()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RatFunc::is_zero)
    }

    pub fn mul(&self, o: &BinaryForm) -> BinaryForm {
        let mut out = BinaryForm::zero(self.degree + o.degree);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out.coeffs[i + j] = &out.coeffs[i + j] + &(a * b);
            }
        }
        out
    }

    /// Multiplies by `ξ^a η^b`.
    pub fn shift(&self, a: u32, b: u32) -> BinaryForm {
        let mut out = BinaryForm::zero(self.degree + a + b);
        for (k, c) in self.coeffs.iter().enumerate() {
            out.coeffs[k + a as usize] = c.clone();
        }
        out
    }

    pub fn scale(&self, c: &RatFunc) -> BinaryForm {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Normalizes the highest nonzero `ξ`-coefficient to one.
    pub fn monic(&self) -> BinaryForm {
        match self.coeffs.iter().rev().find(|c| !c.is_zero()) {
            None => self.clone(),
            Some(c) => self.scale(&c.inv().unwrap()),
        }
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for k in (0..=self.degree).rev() {
            let c = &self.coeffs[k as usize];
            if c.is_zero() {
                continue;
            }
            let e = self.degree - k;
            let mono = match (k, e) {
                (0, 0) => String::new(),
                (a, 0) => pw("xi", a),
                (0, b) => pw("eta", b),
                (a, b) => format!("{}*{}", pw("xi", a), pw("eta", b)),
            };
            parts.push(coef_times(c, &mono));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", join_signed(&parts))
        }
    }
}

fn pw(s: &str, n: u32) -> String {
    if n == 1 {
        s.to_string()
    } else {
        format!("{s}^{n}")
    }
}

pub(crate) fn coef_times(c: &RatFunc, mono: &str) -> String {
    if mono.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        return mono.to_string();
    }
    if c.num()
        .lead_grlex()
        .is_some_and(|(_, v)| num_traits::Signed::is_negative(v))
    {
        return format!("-{}", coef_times(&-c, mono));
    }
    let s = c.to_string();
    let simple = c.num().len() == 1 && c.den().is_one();
    if simple {
        format!("{s}*{mono}")
    } else {
        format!("({s})*{mono}")
    }
}

pub(crate) fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mono = if *m == Mono::ONE { String::new() } else { m.to_string() };
                coef_times(c, &mono)
            })
            .collect();
        write!(f, "{}", join_signed(&parts))
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp({self})")
    }
}

impl Zero for DiffOp {
    fn zero() -> Self {
        DiffOp::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl std::ops::Add for DiffOp {
    type Output = DiffOp;
    fn add(self, o: DiffOp) -> DiffOp {
        DiffOp::add(&self, &o)
    }
}
