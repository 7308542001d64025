//! Classification of admissible types for `ω = 1` systems by complexity.
//!
//! The symbol ideal of such a system is `ξ·H` with `H` primary to the
//! irrelevant ideal and of colength `κ`. Minimal generator degrees of
//! `H` shifted by one give the orders of the type. Every graded Betti
//! table of such an `H` is realized by a monomial ideal, so the types of
//! complexity `κ` are read off the staircases of partitions of `κ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Multiset of orders of the minimal equations, e.g. `2E3 + E4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeSig {
    orders: Vec<u32>,
}

impl TypeSig {
    pub fn new(mut orders: Vec<u32>) -> Self {
        orders.sort_unstable();
        TypeSig { orders }
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn is_e1(&self) -> bool {
        self.orders == [1]
    }

    /// Parses `"2E3+E4"`, `"E2 + E5"` or `"3,3,4"`.
    pub fn parse(s: &str) -> Option<TypeSig> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return None;
        }
        let mut orders = Vec::new();
        if s.contains('E') {
            for part in s.split('+') {
                let (mult, ord) = part.split_once('E')?;
                let mult: usize = if mult.is_empty() { 1 } else { mult.parse().ok()? };
                let ord: u32 = ord.parse().ok()?;
                orders.extend(std::iter::repeat_n(ord, mult));
            }
        } else {
            for p in s.split(',') {
                orders.push(p.parse().ok()?);
            }
        }
        if orders.contains(&0) {
            return None;
        }
        Some(TypeSig::new(orders))
    }
}

impl fmt::Display for TypeSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &o in &self.orders {
            *counts.entry(o).or_default() += 1;
        }
        let parts: Vec<String> = counts
            .iter()
            .map(|(o, c)| if *c == 1 { format!("E{o}") } else { format!("{c}E{o}") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// A staircase: parts `λ_1 ≥ λ_2 ≥ … > 0`; the standard monomials are
/// `ξ^a η^b` with `b < λ_{a+1}`.
type Partition = Vec<u32>;

fn partitions(n: u32, max_part: u32, out: &mut Vec<Partition>, cur: &mut Partition) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    for p in (1..=n.min(max_part)).rev() {
        cur.push(p);
        partitions(n - p, p, out, cur);
        cur.pop();
    }
}

fn all_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    partitions(n, n, &mut out, &mut Vec::new());
    out
}

/// Degrees of the minimal monomial generators of the staircase ideal.
fn corner_degrees(l: &Partition) -> Vec<u32> {
    if l.is_empty() {
        return vec![0];
    }
    let r = l.len();
    let mut d = vec![l[0]];
    for a in 1..r {
        if l[a] < l[a - 1] {
            d.push(a as u32 + l[a]);
        }
    }
    d.push(r as u32);
    d.sort_unstable();
    d
}

/// Hilbert function of `S/H`, degree by degree until it vanishes.
fn quotient_hf(l: &Partition) -> Vec<u32> {
    let top = l.first().copied().unwrap_or(0) + l.len() as u32;
    (0..top)
        .map(|k| {
            (0..=k)
                .filter(|&a| (a as usize) < l.len() && k - a < l[a as usize])
                .count() as u32
        })
        .take_while(|&v| v > 0)
        .collect()
}

/// Symbol dimensions `g_k` of the system with symbol ideal `ξ·H`.
fn gdims_of(l: &Partition) -> Vec<u32> {
    let mut g = vec![1];
    g.extend(quotient_hf(l).iter().map(|v| v + 1));
    g.push(1);
    g
}

fn type_of(l: &Partition) -> TypeSig {
    TypeSig::new(corner_degrees(l).into_iter().map(|d| d + 1).collect())
}

/// Number of generator/relation pairs in excess of the fewest compatible
/// with the Hilbert function.
fn ghost_pairs(l: &Partition) -> u32 {
    let d = quotient_hf(l);
    let at = |i: isize| {
        if i < 0 || i as usize >= d.len() {
            0
        } else {
            d[i as usize] as i64
        }
    };
    let mut generic = 0i64;
    for j in 1..=(d.len() + 2) as isize {
        let c = at(j) - 2 * at(j - 1) + at(j - 2);
        generic += (-c).max(0);
    }
    corner_degrees(l).len() as u32 - generic as u32
}

fn stratum_label(ghosts: u32) -> String {
    if ghosts == 0 {
        "generic".into()
    } else {
        format!("special({ghosts})")
    }
}

/// One realization of a type: symbol dimensions and its stratum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Realization {
    pub gdims: Vec<u32>,
    pub stratum: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZooEntry {
    pub sig: TypeSig,
    pub realizations: Vec<Realization>,
}

/// Distinct types of complexity `n`, sorted by their order sequences.
pub fn enumerate_types(n: u32) -> Vec<ZooEntry> {
    let mut map: BTreeMap<TypeSig, BTreeSet<Realization>> = BTreeMap::new();
    for l in all_partitions(n) {
        let r = Realization {
            gdims: gdims_of(&l),
            stratum: stratum_label(ghost_pairs(&l)),
        };
        map.entry(type_of(&l)).or_default().insert(r);
    }
    map.into_iter()
        .map(|(sig, rs)| ZooEntry {
            sig,
            realizations: rs.into_iter().collect(),
        })
        .collect()
}

/// `R(n)`: number of distinct types of complexity `n`.
pub fn type_count(n: u32) -> usize {
    enumerate_types(n).len()
}

/// Smallest and largest complexity realizing a type, or `None` if the
/// orders are not those of any `ω = 1` system.
pub fn kappa_range(t: &TypeSig) -> Option<(u32, u32)> {
    if t.is_e1() {
        return Some((0, 0));
    }
    if t.orders().iter().any(|&o| o < 2) || t.len() < 2 {
        return None;
    }
    let degs: Vec<u32> = t.orders().iter().map(|o| o - 1).collect();
    let kmax = *degs.last().unwrap();
    let mut lo = u32::MAX;
    let mut hi = 0;
    // Every candidate staircase fits in a kmax × kmax box.
    let mut stack: Vec<Partition> = vec![vec![]];
    while let Some(l) = stack.pop() {
        if !l.is_empty() && corner_degrees(&l) == degs {
            let n: u32 = l.iter().sum();
            lo = lo.min(n);
            hi = hi.max(n);
        }
        if (l.len() as u32) < kmax {
            let cap = l.last().copied().unwrap_or(kmax);
            for p in 1..=cap {
                let mut next = l.clone();
                next.push(p);
                stack.push(next);
            }
        }
    }
    (lo != u32::MAX).then_some((lo, hi))
}

/// An arrow `from → to` is possible only if some system of type `from`
/// has larger complexity than some system of type `to`.
pub fn valid_arrow(from: &TypeSig, to: &TypeSig) -> bool {
    if from.is_e1() {
        return false;
    }
    match (kappa_range(from), kappa_range(to)) {
        (Some((_, fmax)), Some((tmin, _))) => fmax > tmin,
        _ => false,
    }
}

/// Upper bound on the complexity of a type `k_1 ≤ … ≤ k_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexityBound {
    /// `Σ (k_i - i) + (k_1 - r)(k_r - r)`.
    pub value: i64,
    /// Boundary case `r = 2` or `r = k_1`: every realization attains the bound.
    pub equality: bool,
    /// `Σ k_j - r(r+1)/2` when `r = k_1`.
    pub exact: Option<u32>,
}

pub fn complexity_bound(t: &TypeSig) -> ComplexityBound {
    let k = t.orders();
    let r = k.len() as i64;
    if r == 0 {
        return ComplexityBound {
            value: 0,
            equality: false,
            exact: None,
        };
    }
    let s: i64 = k.iter().enumerate().map(|(i, &v)| v as i64 - (i as i64 + 1)).sum();
    let kmin = k[0] as i64;
    let exact = (r == kmin).then(|| (k.iter().map(|&v| v as i64).sum::<i64>() - r * (r + 1) / 2) as u32);
    ComplexityBound {
        value: s + (kmin - r) * (k[k.len() - 1] as i64 - r),
        equality: r == 2 || r == kmin,
        exact,
    }
}

/// `Σ_{i ≥ ω} (g_i - ω)` for a symbol dimension sequence with stable value `ω`.
pub fn generalized_kappa(gdims: &[usize]) -> usize {
    let omega = gdims.last().copied().unwrap_or(0);
    gdims.iter().skip(omega).map(|&g| g.saturating_sub(omega)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigs(n: u32) -> Vec<String> {
        enumerate_types(n).into_iter().map(|e| e.sig.to_string()).collect()
    }

    #[test]
    fn small_tables() {
        assert_eq!(sigs(1), vec!["2E2"]);
        assert_eq!(sigs(2), vec!["E2+E3"]);
        assert_eq!(sigs(3), vec!["E2+E4", "3E3"]);
        assert_eq!(sigs(4), vec!["E2+E5", "2E3", "2E3+E4"]);
    }

    #[test]
    fn bounds_and_boundary_cases() {
        let b = complexity_bound(&TypeSig::parse("4E4").unwrap());
        assert_eq!((b.value, b.equality, b.exact), (6, true, Some(6)));
        let b = complexity_bound(&TypeSig::parse("E3+2E4").unwrap());
        assert_eq!((b.value, b.equality, b.exact), (5, true, Some(5)));
        let b = complexity_bound(&TypeSig::parse("2E4+E5").unwrap());
        assert_eq!((b.value, b.equality), (9, false));
        let b = complexity_bound(&TypeSig::parse("E2+E5").unwrap());
        assert_eq!((b.value, b.equality, b.exact), (4, true, Some(4)));
    }

    #[test]
    fn parse_and_display() {
        let t = TypeSig::parse("2E3+E4").unwrap();
        assert_eq!(t.orders(), &[3, 3, 4]);
        assert_eq!(TypeSig::parse("3,3,4"), Some(t));
    }

    #[test]
    fn ranges_and_arrows() {
        assert_eq!(kappa_range(&TypeSig::parse("2E2").unwrap()), Some((1, 1)));
        assert_eq!(kappa_range(&TypeSig::parse("E2+E3").unwrap()), Some((2, 2)));
        assert_eq!(kappa_range(&TypeSig::parse("3E3").unwrap()), Some((3, 3)));
        assert!(valid_arrow(
            &TypeSig::parse("3E3").unwrap(),
            &TypeSig::parse("E2+E3").unwrap()
        ));
        assert!(!valid_arrow(
            &TypeSig::parse("E1").unwrap(),
            &TypeSig::parse("2E2").unwrap()
        ));
        assert!(!valid_arrow(
            &TypeSig::parse("2E2").unwrap(),
            &TypeSig::parse("E2+E3").unwrap()
        ));
    }

    #[test]
    fn strata_of_two_e_three() {
        let e = enumerate_types(4);
        let two = e.iter().find(|z| z.sig.to_string() == "2E3").unwrap();
        let three = e.iter().find(|z| z.sig.to_string() == "2E3+E4").unwrap();
        assert_eq!(two.realizations[0].stratum, "generic");
        assert_eq!(three.realizations[0].stratum, "special(1)");
        assert_eq!(two.realizations[0].gdims, three.realizations[0].gdims);
    }
}
