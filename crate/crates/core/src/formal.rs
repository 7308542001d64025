//! Formal analysis of a linear system: completion to a reduced Gröbner
//! basis of the left ideal, compatibility, the symbol module with its
//! dimensions, the characteristic divisor and the Spencer numbers.

use std::collections::HashMap;
use std::fmt;

use crate::diffop::{BinaryForm, DiffOp, Frame, Mono};
use crate::linalg;
use crate::ratfield::{RatFunc, UPoly};
use crate::zoo::TypeSig;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormalError {
    #[error("the ideal contains 1: the system has only the zero solution")]
    TrivialIdeal,
    #[error("symbol dimensions do not stabilize: characteristic variety is not discrete")]
    NonDiscreteCharVariety,
    #[error("system has no nonzero equations")]
    EmptySystem,
}

/// A linear system `F_i[u] = 0` together with the frame used to read its
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDESystem {
    generators: Vec<DiffOp>,
    frame: Frame,
}

impl PDESystem {
    /// Drops zero operators and scales each generator to leading
    /// coefficient one. The ideal is not altered.
    pub fn new(generators: Vec<DiffOp>) -> Result<Self, FormalError> {
        let mut gens: Vec<DiffOp> = Vec::new();
        for g in generators {
            let g = g.monic();
            if !g.is_zero() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        if gens.is_empty() {
            return Err(FormalError::EmptySystem);
        }
        Ok(PDESystem {
            generators: gens,
            frame: Frame::plain(),
        })
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn generators(&self) -> &[DiffOp] {
        &self.generators
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn max_order(&self) -> u32 {
        self.generators.iter().filter_map(DiffOp::order).max().unwrap_or(0)
    }
}

/// Where a new element found during completion came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// An input generator reduced by the elements found before it.
    Input(usize),
    /// The S-polynomial of two elements of the working list.
    Pair(usize, usize),
}

/// One reduction performed during completion; `result` is zero when the
/// reduction closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub source: Source,
    pub result: DiffOp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletedIdeal {
    /// Reduced Gröbner basis, ascending by leading monomial.
    pub basis: Vec<DiffOp>,
    pub trivial: bool,
    pub record: Vec<Derivation>,
}

impl CompletedIdeal {
    pub fn leading_monomials(&self) -> Vec<Mono> {
        self.basis.iter().filter_map(DiffOp::lm).collect()
    }

    pub fn max_order(&self) -> u32 {
        self.basis.iter().filter_map(DiffOp::order).max().unwrap_or(0)
    }

    pub fn normal_form(&self, op: &DiffOp) -> DiffOp {
        Reducer::new(&self.basis).reduce(op)
    }

    pub fn contains(&self, op: &DiffOp) -> bool {
        self.normal_form(op).is_zero()
    }

    pub fn to_system(&self) -> PDESystem {
        PDESystem {
            generators: self.basis.clone(),
            frame: Frame::plain(),
        }
    }
}

/// Reduction modulo a fixed list with memoized prolongations `∂^γ G`.
pub struct Reducer<'a> {
    basis: &'a [DiffOp],
    lms: Vec<Mono>,
    cache: HashMap<(usize, Mono), DiffOp>,
}

impl<'a> Reducer<'a> {
    pub fn new(basis: &'a [DiffOp]) -> Self {
        Reducer {
            basis,
            lms: basis.iter().map(|g| g.lm().unwrap()).collect(),
            cache: HashMap::new(),
        }
    }

    fn divisor(&self, m: Mono) -> Option<usize> {
        self.lms.iter().position(|l| l.divides(m))
    }

    fn prolonged(&mut self, i: usize, g: Mono) -> &DiffOp {
        let basis = self.basis;
        self.cache.entry((i, g)).or_insert_with(|| basis[i].mul_left_mono(g))
    }

    /// Full reduction: no monomial of the result is divisible by a leading
    /// monomial of the list.
    pub fn reduce(&mut self, f: &DiffOp) -> DiffOp {
        let mut f = f.clone();
        let mut cursor: Option<Mono> = None;
        loop {
            let next = f
                .terms()
                .rev()
                .map(|(m, _)| *m)
                .filter(|m| cursor.is_none_or(|c| *m < c))
                .find_map(|m| self.divisor(m).map(|i| (m, i)));
            let Some((m, i)) = next else { break };
            let c = f.coeff(m);
            let gamma = m.sub(self.lms[i]);
            let p = self.prolonged(i, gamma).clone();
            f.sub_scaled(&c, &p);
            f.remove(m);
            cursor = Some(m);
        }
        f
    }
}

fn spoly(f: &DiffOp, g: &DiffOp) -> (Mono, DiffOp) {
    let (a, b) = (f.lm().unwrap(), g.lm().unwrap());
    let l = a.lcm(b);
    let s = f.mul_left_mono(l.sub(a)).sub(&g.mul_left_mono(l.sub(b)));
    (l, s)
}

/// Buchberger completion of the left ideal generated by the system.
pub fn complete(sys: &PDESystem) -> CompletedIdeal {
    complete_ops(sys.generators())
}

pub fn complete_ops(gens: &[DiffOp]) -> CompletedIdeal {
    let mut record = Vec::new();
    let mut work: Vec<DiffOp> = Vec::new();
    let mut order: Vec<(usize, &DiffOp)> = gens.iter().enumerate().collect();
    order.sort_by_key(|(_, g)| g.lm());
    let trivial_result = |record| CompletedIdeal {
        basis: vec![DiffOp::one()],
        trivial: true,
        record,
    };

    for (idx, g) in order {
        let r = Reducer::new(&work).reduce(g).monic();
        if r != *g || r.is_zero() {
            record.push(Derivation {
                source: Source::Input(idx),
                result: r.clone(),
            });
        }
        if r.is_zero() {
            continue;
        }
        if r.order() == Some(0) {
            return trivial_result(record);
        }
        work.push(r);
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..work.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    // Smallest lcm first.
    while let Some(pos) = (0..pairs.len()).min_by_key(|&p| {
        let (i, j) = pairs[p];
        (work[i].lm().unwrap().lcm(work[j].lm().unwrap()), p)
    }) {
        let (i, j) = pairs.swap_remove(pos);
        let (li, lj) = (work[i].lm().unwrap(), work[j].lm().unwrap());
        let l = li.lcm(lj);
        // Chain criterion: some k with lm(k) | lcm whose pairs with i and j
        // were already treated.
        let chain = (0..work.len()).any(|k| {
            k != i
                && k != j
                && work[k].lm().unwrap().divides(l)
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let (_, s) = spoly(&work[i], &work[j]);
        let r = Reducer::new(&work).reduce(&s).monic();
        record.push(Derivation {
            source: Source::Pair(i, j),
            result: r.clone(),
        });
        if r.is_zero() {
            continue;
        }
        if r.order() == Some(0) {
            return trivial_result(record);
        }
        let n = work.len();
        work.push(r);
        for k in 0..n {
            pairs.push((k, n));
        }
    }

    CompletedIdeal {
        basis: interreduce(work),
        trivial: false,
        record,
    }
}

/// Minimal, fully reduced, monic basis sorted by leading monomial.
fn interreduce(work: Vec<DiffOp>) -> Vec<DiffOp> {
    let mut keep: Vec<DiffOp> = Vec::new();
    for (i, g) in work.iter().enumerate() {
        let lm = g.lm().unwrap();
        let redundant = work.iter().enumerate().any(|(j, h)| {
            let hl = h.lm().unwrap();
            j != i && hl.divides(lm) && (hl != lm || j < i)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    keep.sort_by_key(|g| g.lm());
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<DiffOp> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let lm = keep[i].lm().unwrap();
        let lc = keep[i].coeff(lm);
        let mut tail = keep[i].clone();
        tail.remove(lm);
        let mut red = Reducer::new(&others).reduce(&tail);
        red.add_term(lm, &lc);
        out.push(red.monic());
    }
    out
}

pub fn normal_form(op: &DiffOp, ci: &CompletedIdeal) -> DiffOp {
    ci.normal_form(op)
}

fn lm_count(lms: &[Mono], k: u32) -> usize {
    Mono::of_degree(k).filter(|m| lms.iter().any(|l| l.divides(*m))).count()
}

/// Basis of the symbol space `J_k`: one prolonged principal symbol per
/// monomial of degree `k` in the leading-monomial ideal.
pub fn symbol_space(ci: &CompletedIdeal, k: u32) -> Vec<BinaryForm> {
    let lms = ci.leading_monomials();
    Mono::of_degree(k)
        .filter_map(|m| {
            let i = lms.iter().position(|l| l.divides(m))?;
            let g = m.sub(lms[i]);
            Some(ci.basis[i].principal_symbol().shift(g.dx, g.dy))
        })
        .collect()
}

/// Span of the prolonged principal symbols of the input generators.
fn predicted_space(sys: &PDESystem, k: u32) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    for g in sys.generators() {
        let d = g.order().unwrap();
        if d > k {
            continue;
        }
        let s = g.principal_symbol();
        for a in 0..=(k - d) {
            out.push(s.shift(a, k - d - a));
        }
    }
    out
}

fn form_rank(forms: &[BinaryForm]) -> usize {
    let rows: Vec<Vec<RatFunc>> = forms.iter().map(|f| f.coeffs.clone()).collect();
    linalg::rank(&rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    /// A lower-order consequence not predicted by the symbols of the inputs.
    Incompatible {
        order: u32,
        witness: DiffOp,
    },
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible)
    }
}

/// Compares the symbol spaces of the completed ideal with those spanned by
/// prolongations of the input equations.
pub fn is_compatible(sys: &PDESystem, ci: &CompletedIdeal) -> Compatibility {
    let top = sys.max_order().max(ci.max_order()) + 1;
    let lms = ci.leading_monomials();
    let mut mismatch = None;
    for k in 0..=top {
        let actual = if ci.trivial { k as usize + 1 } else { lm_count(&lms, k) };
        if form_rank(&predicted_space(sys, k)) != actual {
            mismatch = Some(k);
            break;
        }
    }
    let Some(k) = mismatch else {
        return Compatibility::Compatible;
    };
    for d in &ci.record {
        let r = &d.result;
        let Some(o) = r.order() else { continue };
        let mut p = predicted_space(sys, o);
        let before = form_rank(&p);
        p.push(r.principal_symbol());
        if form_rank(&p) > before {
            return Compatibility::Incompatible {
                order: o,
                witness: r.clone(),
            };
        }
    }
    let witness = ci
        .basis
        .iter()
        .find(|g| g.order() == Some(k))
        .cloned()
        .unwrap_or_else(DiffOp::one);
    Compatibility::Incompatible { order: k, witness }
}

/// Characteristic divisor: square-free factors of the gcd of the stable
/// symbol space with their multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharDivisor {
    pub factors: Vec<(BinaryForm, u32)>,
}

impl CharDivisor {
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(f, m)| f.degree * m).sum()
    }

    /// True when the divisor is the single point `ξ = 0` with multiplicity one.
    pub fn is_xi(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1 && self.factors[0].0 == BinaryForm::xi()
    }

    pub fn is_eta(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1 && self.factors[0].0 == BinaryForm::eta()
    }
}

impl fmt::Display for CharDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(b, m)| if *m == 1 { format!("[{b}]") } else { format!("{m}[{b}]") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn dehomogenize(f: &BinaryForm) -> UPoly {
    UPoly::new(f.coeffs.clone())
}

fn homogenize(p: &UPoly, degree: u32) -> BinaryForm {
    let mut b = BinaryForm::zero(degree);
    for (k, c) in p.coeffs().iter().enumerate() {
        b.coeffs[k] = c.clone();
    }
    b
}

/// Gcd of binary forms over `Q(x, y)`, normalized by [`BinaryForm::monic`].
pub fn form_gcd(forms: &[BinaryForm]) -> BinaryForm {
    let mut eta = u32::MAX;
    let mut g = UPoly::zero();
    for f in forms.iter().filter(|f| !f.is_zero()) {
        let p = dehomogenize(f);
        eta = eta.min(f.degree - p.degree() as u32);
        g = UPoly::gcd(&g, &p);
    }
    if eta == u32::MAX {
        return BinaryForm::zero(0);
    }
    let d = g.degree() as u32;
    homogenize(&g, d).shift(0, eta).monic()
}

pub fn char_divisor_of(g: &BinaryForm) -> CharDivisor {
    let mut factors = Vec::new();
    let p = dehomogenize(g);
    let eta = g.degree - p.degree() as u32;
    if eta > 0 {
        factors.push((BinaryForm::eta(), eta));
    }
    let xi = p.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
    if xi > 0 {
        factors.push((BinaryForm::xi(), xi as u32));
    }
    let rest = UPoly::new(p.coeffs()[xi..].to_vec());
    if rest.degree() > 0 {
        for (i, f) in rest.squarefree().into_iter().enumerate() {
            if f.degree() > 0 {
                factors.push((homogenize(&f, f.degree() as u32).monic(), i as u32 + 1));
            }
        }
    }
    CharDivisor { factors }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolProfile {
    /// `dim g_k` for `k = 0..=k_stab + 1`.
    pub gdims: Vec<usize>,
    pub k_stab: u32,
    pub omega: u32,
    pub char_divisor: CharDivisor,
    /// `Σ (g_k - ω)` over `k ≥ ω`; the complexity `κ` when `ω = 1`.
    pub kappa: usize,
}

impl SymbolProfile {
    /// Dimension of the solution space when `ω = 0`.
    pub fn solution_dim(&self) -> Option<usize> {
        (self.omega == 0).then(|| self.gdims.iter().sum())
    }
}

fn gdims_upto(ci: &CompletedIdeal, n: u32) -> Vec<usize> {
    if ci.trivial {
        return vec![0; n as usize + 1];
    }
    let lms = ci.leading_monomials();
    (0..=n).map(|k| k as usize + 1 - lm_count(&lms, k)).collect()
}

pub fn symbol_profile(ci: &CompletedIdeal) -> Result<SymbolProfile, FormalError> {
    if ci.trivial {
        return Err(FormalError::TrivialIdeal);
    }
    if ci.basis.is_empty() {
        return Err(FormalError::NonDiscreteCharVariety);
    }
    let d = ci.max_order();
    let horizon = 2 * d + 2;
    let all = gdims_upto(ci, horizon);
    let last = *all.last().unwrap();
    if all[(d + 1) as usize..].iter().any(|&v| v != last) {
        return Err(FormalError::NonDiscreteCharVariety);
    }
    let mut k_stab = horizon;
    while k_stab > 0 && all[k_stab as usize - 1] == last {
        k_stab -= 1;
    }
    let omega = last as u32;
    let forms: Vec<BinaryForm> = ci.basis.iter().map(DiffOp::principal_symbol).collect();
    let g = form_gcd(&forms);
    let char_divisor = char_divisor_of(&g);
    debug_assert_eq!(char_divisor.degree(), omega);
    let kappa = all
        .iter()
        .skip(omega as usize)
        .map(|&v| v.saturating_sub(omega as usize))
        .sum();
    Ok(SymbolProfile {
        gdims: all[..=(k_stab as usize + 1)].to_vec(),
        k_stab,
        omega,
        char_divisor,
        kappa,
    })
}

pub fn generalized_kappa(p: &SymbolProfile) -> usize {
    p.kappa
}

/// Counts of new symbol generators and relations per order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpencerNumbers {
    /// `m[k]` minimal generators of the symbol module at order `k`.
    pub m: Vec<usize>,
    pub h1: usize,
    pub h2: usize,
    /// Relations among the generators per order.
    pub syzygies: Vec<usize>,
    pub type_sig: TypeSig,
}

pub fn spencer_numbers(ci: &CompletedIdeal) -> Result<SpencerNumbers, FormalError> {
    if ci.trivial {
        return Err(FormalError::TrivialIdeal);
    }
    let top = ci.max_order() + 2;
    let lms = ci.leading_monomials();
    let mut m = vec![0usize; top as usize + 1];
    let mut prev: Vec<BinaryForm> = Vec::new();
    for k in 0..=top {
        let dim = lm_count(&lms, k);
        let mut lifted = Vec::new();
        for f in &prev {
            lifted.push(f.shift(1, 0));
            lifted.push(f.shift(0, 1));
        }
        let r = if lifted.is_empty() { 0 } else { form_rank(&lifted) };
        m[k as usize] = dim - r;
        prev = symbol_space(ci, k);
    }
    while m.last() == Some(&0) {
        m.pop();
    }
    let h1 = m.iter().sum();
    // Relations from the Hilbert series: (1-t)^2 Σ g_k t^k = 1 - Σ m_k t^k + Σ s_k t^k.
    let n = top as usize + 3;
    let g = gdims_upto(ci, n as u32);
    let at = |i: isize| if i < 0 { 0isize } else { g[i as usize] as isize };
    let mut syz = vec![0usize; n + 1];
    for (j, slot) in syz.iter_mut().enumerate() {
        let ji = j as isize;
        let c = at(ji) - 2 * at(ji - 1) + at(ji - 2);
        let beta = m.get(j).copied().unwrap_or(0) as isize;
        let s = c - isize::from(j == 0) + beta;
        debug_assert!(s >= 0);
        *slot = s.max(0) as usize;
    }
    while syz.last() == Some(&0) {
        syz.pop();
    }
    let h2 = syz.iter().sum();
    let mut orders = Vec::new();
    for (k, &c) in m.iter().enumerate() {
        orders.extend(std::iter::repeat_n(k as u32, c));
    }
    Ok(SpencerNumbers {
        m,
        h1,
        h2,
        syzygies: syz,
        type_sig: TypeSig::new(orders),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn sys(text: &str) -> PDESystem {
        PDESystem::new(parse(text).unwrap().equations).unwrap()
    }

    #[test]
    fn constant_two_e_two() {
        let s = sys("u_xx = 0\nu_xy = 0\n");
        let ci = complete(&s);
        assert!(is_compatible(&s, &ci).is_compatible());
        let p = symbol_profile(&ci).unwrap();
        assert_eq!(p.gdims, vec![1, 2, 1, 1]);
        assert_eq!(p.omega, 1);
        assert!(p.char_divisor.is_xi());
        assert_eq!(p.kappa, 1);
        let sp = spencer_numbers(&ci).unwrap();
        assert_eq!(sp.type_sig.to_string(), "2E2");
        assert_eq!((sp.h1, sp.h2), (2, 1));
    }

    #[test]
    fn hidden_first_order_consequence() {
        let s = sys("u_xx = 0\nu_xy = u\n");
        let ci = complete(&s);
        match is_compatible(&s, &ci) {
            Compatibility::Incompatible { order, witness } => {
                assert_eq!(order, 1);
                assert_eq!(witness, DiffOp::dx());
            }
            c => panic!("{c:?}"),
        }
        assert!(ci.trivial);
    }

    #[test]
    fn first_order_equation() {
        let s = sys("u_x + x*y*u = 0\n");
        let ci = complete(&s);
        let p = symbol_profile(&ci).unwrap();
        assert_eq!(p.gdims, vec![1, 1]);
        assert_eq!(p.kappa, 0);
        assert_eq!(spencer_numbers(&ci).unwrap().type_sig.to_string(), "E1");
    }

    #[test]
    fn two_e_three_with_extra_generator() {
        // Symbol ideal ξ(ξ^2, η^2): complete-intersection cofactor, no
        // generator beyond order three.
        let s = sys("u_xxx = 0\nu_xyy = 0\n");
        let ci = complete(&s);
        let p = symbol_profile(&ci).unwrap();
        assert_eq!(p.gdims, vec![1, 2, 3, 2, 1, 1]);
        let sp = spencer_numbers(&ci).unwrap();
        assert_eq!(sp.type_sig.to_string(), "2E3");
        assert_eq!(p.kappa, 4);
    }
}
