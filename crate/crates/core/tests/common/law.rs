//! Walks corpus members through successive Laplace steps and checks the
//! complexity law and the inverse contracts on every step.

use std::collections::BTreeSet;

use omega_core::diffop::DiffOp;
use omega_core::formal::PDESystem;
use omega_core::laplace::{
    inverse_operator_alt, inverse_unique_check, laplace_step, relative_invariants, InverseKind, LaplaceStep,
};

use super::{is_generic, Member};

pub struct Walk {
    /// Each step with the branch label of its source, when the source type
    /// has an invariant table.
    pub steps: Vec<(LaplaceStep, Option<String>)>,
}

/// Steps while the transformed system keeps class one and is not `E1`.
pub fn walk(sys: &PDESystem) -> Result<Walk, String> {
    let mut cur = sys.clone();
    let mut steps = Vec::new();
    for _ in 0..12 {
        let st = laplace_step(&cur).map_err(|e| e.to_string())?;
        let label = relative_invariants(&cur).ok().map(|r| r.label);
        let next = match &st.after {
            Some((t, 1, _)) if !t.is_e1() => Some(st.transformed_system()),
            _ => None,
        };
        steps.push((st, label));
        match next {
            Some(n) => cur = n,
            None => return Ok(Walk { steps }),
        }
    }
    Err("no terminal reached after 12 steps".into())
}

/// Complexity after a step; systems leaving class one count as zero.
pub fn kappa_after(st: &LaplaceStep) -> usize {
    match &st.after {
        Some((_, 1, k)) => *k,
        _ => 0,
    }
}

pub struct LawSummary {
    pub members: usize,
    pub steps: usize,
    pub generic_steps: usize,
    pub classes: BTreeSet<String>,
}

/// Every step lowers κ; steps from a generic branch lower it by exactly one.
pub fn complexity_law(corpus: &[Member]) -> Result<LawSummary, String> {
    let mut s = LawSummary {
        members: corpus.len(),
        steps: 0,
        generic_steps: 0,
        classes: BTreeSet::new(),
    };
    for m in corpus {
        s.classes.insert(m.class.clone().unwrap_or_else(|| m.type_sig.clone()));
        let w = walk(&m.system).map_err(|e| format!("{}: {e}", m.name))?;
        for (st, label) in &w.steps {
            s.steps += 1;
            let (before, after) = (st.kappa_before, kappa_after(st));
            if after >= before {
                return Err(format!("{}: κ {before} → {after} at {}", m.name, st.type_before));
            }
            if label.as_deref().is_some_and(is_generic) {
                s.generic_steps += 1;
                if before - after != 1 {
                    return Err(format!("{}: generic {label:?} lowers κ {before} → {after}", m.name));
                }
            }
        }
    }
    Ok(s)
}

/// `L∘X − 1` lies in the source ideal, and an independently produced
/// inverse agrees with `L` modulo the transformed ideal. Returns the
/// number of differential steps checked.
pub fn inverse_contracts(corpus: &[Member]) -> Result<usize, String> {
    let mut n = 0;
    for m in corpus {
        let w = walk(&m.system).map_err(|e| format!("{}: {e}", m.name))?;
        for (st, _) in &w.steps {
            if st.kind != InverseKind::Differential {
                continue;
            }
            n += 1;
            let l = st
                .inverse_op
                .as_ref()
                .ok_or(format!("{}: differential step without L", m.name))?;
            if !st.source.contains(&l.mul(&st.x_op).sub(&DiffOp::one())) {
                return Err(format!("{}: L∘X − 1 = {} is not in the ideal", m.name, l.mul(&st.x_op)));
            }
            let alt = inverse_operator_alt(st).ok_or(format!("{}: no second inverse", m.name))?;
            if !inverse_unique_check(l, &alt, st) {
                return Err(format!("{}: inverses {l} and {alt} differ", m.name));
            }
        }
    }
    Ok(n)
}
