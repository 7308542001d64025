//! JSON sections of the reports and the mapping of errors to exit codes.

use serde_json::{json, Map, Value};

use omega_core::classical::{
    darboux_status, invariant_h0, invariant_k0, invariant_sequence, ClassicalError, DarbouxStatus, HyperbolicE2,
    IntermediateIntegral, Truncation,
};
use omega_core::diffop::DiffOp;
use omega_core::formal::{
    complete, is_compatible, spencer_numbers, symbol_profile, Compatibility, FormalError, PDESystem,
};
use omega_core::laplace::{integrate_full, laplace_step, relative_invariants, LaplaceError, TraceEntry};
use omega_core::parse::{format_equation, InputDocument, ParseError};
use omega_core::zoo::{complexity_bound, enumerate_types, kappa_range};

const DEFAULT_DEPTH: usize = 10;

/// An error diagnostic with its exit status. `partial` holds sections
/// computed before the failure.
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub code: &'static str,
    pub message: String,
    pub partial: Map<String, Value>,
}

impl Failure {
    pub fn new(exit: u8, code: &'static str, message: String) -> Self {
        Failure {
            exit,
            code,
            message,
            partial: Map::new(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(2, "parse_error", e.to_string())
    }
}

impl From<FormalError> for Failure {
    fn from(e: FormalError) -> Self {
        match e {
            FormalError::TrivialIdeal => Failure::new(4, "incompatible", e.to_string()),
            _ => Failure::new(3, "unsupported", e.to_string()),
        }
    }
}

impl From<LaplaceError> for Failure {
    fn from(e: LaplaceError) -> Self {
        let msg = e.to_string();
        match e {
            LaplaceError::Incompatible { .. } => Failure::new(4, "incompatible", msg),
            LaplaceError::ReducedToODE { .. } | LaplaceError::QuadratureResidual(_) => Failure::new(5, "residual", msg),
            LaplaceError::Formal(f) => f.into(),
            _ => Failure::new(3, "unsupported", msg),
        }
    }
}

impl From<ClassicalError> for Failure {
    fn from(e: ClassicalError) -> Self {
        Failure::new(3, "unsupported", e.to_string())
    }
}

/// Adds status, exit code, diagnostics and the sections of `result`.
pub fn finish(out: &mut Value, result: Result<Value, Failure>) {
    let o = out.as_object_mut().expect("report is an object");
    let (sections, exit, diags) = match result {
        Ok(Value::Object(m)) => (m, 0, vec![]),
        Ok(other) => (Map::from_iter([("result".to_string(), other)]), 0, vec![]),
        Err(f) => {
            let d = json!({ "level": "error", "code": f.code, "message": f.message });
            (f.partial, f.exit, vec![d])
        }
    };
    let mut warnings: Vec<Value> = Vec::new();
    for (k, v) in sections {
        if k == "warnings" {
            if let Value::Array(w) = v {
                warnings.extend(w);
            }
        } else {
            o.insert(k, v);
        }
    }
    let mut all = diags;
    all.extend(warnings);
    o.insert("status".into(), json!(if exit == 0 { "ok" } else { "error" }));
    o.insert("exit_code".into(), json!(exit));
    o.insert("diagnostics".into(), Value::Array(all));
}

fn op_str(op: &DiffOp, unknown: &str) -> String {
    format_equation(op, unknown)
}

fn system(doc: &InputDocument) -> Result<PDESystem, Failure> {
    Ok(PDESystem::new(doc.equations.clone())?)
}

/// Formal analysis; never fails on incompatibility, it reports it.
fn analysis_section(doc: &InputDocument) -> Result<(Value, Compatibility), Failure> {
    let sys = system(doc)?;
    let ci = complete(&sys);
    let compat = is_compatible(&sys, &ci);
    let u = doc.unknown.as_str();
    let mut a = Map::new();
    a.insert("unknown".into(), json!(u));
    a.insert(
        "equations".into(),
        json!(doc.equations.iter().map(|e| op_str(e, u)).collect::<Vec<_>>()),
    );
    a.insert(
        "orders".into(),
        json!(doc.equations.iter().map(|e| e.order().unwrap_or(0)).collect::<Vec<_>>()),
    );
    a.insert("compatible".into(), json!(compat.is_compatible()));
    a.insert(
        "witness".into(),
        match &compat {
            Compatibility::Compatible => Value::Null,
            Compatibility::Incompatible { order, witness } => {
                json!({ "order": order, "equation": op_str(witness, u) })
            }
        },
    );
    a.insert("trivial".into(), json!(ci.trivial));
    a.insert(
        "basis".into(),
        json!(ci.basis.iter().map(|g| op_str(g, u)).collect::<Vec<_>>()),
    );
    let mut warnings = Vec::new();
    match symbol_profile(&ci) {
        Ok(p) => {
            a.insert("gdims".into(), json!(p.gdims));
            a.insert("k_stab".into(), json!(p.k_stab));
            a.insert("omega".into(), json!(p.omega));
            a.insert("char_divisor".into(), json!(p.char_divisor.to_string()));
            a.insert("kappa".into(), json!(p.kappa));
        }
        Err(e) => {
            for k in ["gdims", "k_stab", "omega", "char_divisor", "kappa"] {
                a.insert(k.into(), Value::Null);
            }
            warnings.push(json!({ "level": "warning", "code": "no_profile", "message": e.to_string() }));
        }
    }
    match spencer_numbers(&ci) {
        Ok(s) => {
            a.insert("h1".into(), json!(s.h1));
            // h² of an incompatible input is not that of its completion.
            a.insert(
                "h2".into(),
                if compat.is_compatible() {
                    json!(s.h2)
                } else {
                    Value::Null
                },
            );
            a.insert("type".into(), json!(s.type_sig.to_string()));
        }
        Err(_) => {
            for k in ["h1", "h2", "type"] {
                a.insert(k.into(), Value::Null);
            }
        }
    }
    let mut out = Map::new();
    out.insert("analysis".into(), Value::Object(a));
    if !warnings.is_empty() {
        out.insert("warnings".into(), Value::Array(warnings));
    }
    Ok((Value::Object(out), compat))
}

pub fn analyze(doc: &InputDocument) -> Result<Value, Failure> {
    let (v, compat) = analysis_section(doc)?;
    match compat {
        Compatibility::Compatible => Ok(v),
        Compatibility::Incompatible { order, .. } => {
            let msg = format!("system is incompatible: hidden consequence of order {order}");
            let mut f = Failure::new(4, "incompatible", msg);
            f.partial = v.as_object().cloned().unwrap_or_default();
            Err(f)
        }
    }
}

fn trace_json(t: &TraceEntry) -> Value {
    json!({
        "from": t.from.to_string(),
        "kappa_from": t.kappa_from,
        "to": t.to,
        "kappa_to": t.kappa_to,
        "kind": t.kind.name(),
        "branch": t.branch,
    })
}

pub fn laplace(doc: &InputDocument) -> Result<Value, Failure> {
    let sys = system(doc)?;
    let st = laplace_step(&sys)?;
    let branch = relative_invariants(&sys).ok().map(|r| r.label);
    let after = match &st.after {
        Some((t, omega, kappa)) => json!({ "type": t.to_string(), "omega": omega, "kappa": kappa }),
        None => Value::Null,
    };
    let step = json!({
        "gauge_a": st.gauge.a.to_string(),
        "x_operator": st.x_op.to_string(),
        "type_before": st.type_before.to_string(),
        "kappa_before": st.kappa_before,
        "branch": branch,
        "kind": st.kind.name(),
        "inverse_order": st.inverse_order,
        "inverse_operator": st.inverse_op.as_ref().map(|l| l.to_string()),
        "frobenius": st.frobenius.as_ref().map(|f| json!({ "q": f.q.to_string(), "p": f.p.to_string() })),
        "kernel_order": st.kernel_order,
        "transformed_basis": st.transformed.basis.iter().map(|g| op_str(g, "v")).collect::<Vec<_>>(),
        "transformed": after,
    });
    Ok(json!({ "step": step }))
}

pub fn solve(doc: &InputDocument, with_trace: bool) -> Result<Value, Failure> {
    let sys = system(doc)?;
    let r = integrate_full(&sys)?;
    let sol = json!({
        "expression": r.solution.render("f"),
        "function": "f",
        "q": r.solution.q(),
        "constants": r.solution.num_constants(),
        "kappa": r.kappa,
        "shape_ok": r.shape_ok,
        "terminal": r.terminal.describe(),
        "verified": r.verified,
    });
    let mut out = Map::new();
    out.insert("solution".into(), sol);
    if with_trace {
        out.insert("trace".into(), Value::Array(r.trace.iter().map(trace_json).collect()));
    }
    if r.verified == Some(false) {
        let mut f = Failure::new(
            1,
            "verification_failed",
            "the solution does not satisfy the system".into(),
        );
        f.partial = out;
        return Err(f);
    }
    Ok(Value::Object(out))
}

pub fn invariants(doc: &InputDocument) -> Result<Value, Failure> {
    let sys = system(doc)?;
    let r = relative_invariants(&sys)?;
    let named = |v: &[(String, omega_core::ratfield::RatFunc)]| {
        v.iter()
            .map(|(n, x)| json!({ "name": n, "value": x.to_string() }))
            .collect::<Vec<_>>()
    };
    Ok(json!({
        "invariants": {
            "type": r.type_sig.to_string(),
            "class": r.class,
            "label": r.label,
            "gauge_a": r.gauge.a.to_string(),
            "y_shift": r.y_shift.to_string(),
            "values": named(&r.invariants),
            "conditional": r.conditional.iter()
                .map(|(n, x, c)| json!({ "name": n, "value": x.to_string(), "condition": c }))
                .collect::<Vec<_>>(),
            "ties": r.ties.iter().map(|(t, ok)| json!({ "relation": t, "holds": ok })).collect::<Vec<_>>(),
            "coefficients": named(&r.coefficients),
        }
    }))
}

fn reason(t: Truncation) -> &'static str {
    match t {
        Truncation::HitZero => "hit_zero",
        Truncation::DepthReached => "depth_reached",
    }
}

fn integral_json(i: &IntermediateIntegral) -> Value {
    json!({
        "side": i.side.to_string(),
        "level": i.level,
        "order": i.order,
        "constraint": op_str(&i.constraint, "u"),
        "pair": i.pair.iter().map(|g| op_str(g, "u")).collect::<Vec<_>>(),
        "pair_type": i.descriptor(),
        "pair_omega": i.pair_omega,
    })
}

pub fn classic(doc: &InputDocument, depth: Option<usize>) -> Result<Value, Failure> {
    if doc.equations.len() != 1 {
        return Err(Failure::new(
            3,
            "unsupported",
            "classic needs exactly one equation".into(),
        ));
    }
    let e = HyperbolicE2::from_op(&doc.equations[0])?;
    let depth = depth.or_else(|| doc.option_usize("depth")).unwrap_or(DEFAULT_DEPTH);
    let seq = invariant_sequence(&e, depth);
    let st = darboux_status(&seq);
    let status = match &st {
        DarbouxStatus::IntegrableBothSides { k, h } => {
            json!({ "verdict": st.name(), "integrals": [integral_json(k), integral_json(h)] })
        }
        DarbouxStatus::SemiIntegrable(i) => json!({
            "verdict": st.name(),
            "side": i.side.to_string(),
            "level": i.level,
            "integrals": [integral_json(i)],
        }),
        DarbouxStatus::Inconclusive(d) => json!({ "verdict": st.name(), "depth": d, "integrals": [] }),
    };
    let strs = |v: &[omega_core::ratfield::RatFunc]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    Ok(json!({
        "classic": {
            "equation": op_str(&e.to_op(), &doc.unknown),
            "a": e.a.to_string(),
            "b": e.b.to_string(),
            "c": e.c.to_string(),
            "k0": invariant_k0(&e).to_string(),
            "h0": invariant_h0(&e).to_string(),
            "depth": depth,
            "k": strs(&seq.k),
            "h": strs(&seq.h),
            "k_reason": reason(seq.k_reason),
            "h_reason": reason(seq.h_reason),
            "status": status,
        }
    }))
}

pub fn zoo(kappa: Option<u32>, upto: Option<u32>) -> Value {
    let range = match (kappa, upto) {
        (Some(k), _) => k..=k,
        (None, Some(n)) => 1..=n,
        (None, None) => 1..=10,
    };
    let rows: Vec<Value> = range
        .map(|n| {
            let entries = enumerate_types(n);
            let types: Vec<Value> = entries
                .iter()
                .map(|t| {
                    let bound = complexity_bound(&t.sig);
                    json!({
                        "type": t.sig.to_string(),
                        "kappa_range": kappa_range(&t.sig).map(|(a, b)| vec![a, b]),
                        "bound": bound.value,
                        "bound_attained": bound.equality,
                        "realizations": t.realizations.iter()
                            .map(|r| json!({ "gdims": r.gdims, "stratum": r.stratum }))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            // Strata are only catalogued up to κ = 6.
            json!({ "kappa": n, "count": entries.len(), "extrapolated": n > 6, "types": types })
        })
        .collect();
    json!({ "zoo": { "rows": rows } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn not_class_one_is_unsupported() {
        let f: Failure = LaplaceError::NotClassOne(2).into();
        assert_eq!(f.exit, 3);
        let f: Failure = FormalError::TrivialIdeal.into();
        assert_eq!(f.exit, 4);
    }
}
