use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("omega-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_omega")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, text) = run(&a);
    (code, serde_json::from_str(&text).unwrap())
}

fn check_envelope(v: &Value) {
    for k in ["command", "status", "exit_code", "diagnostics"] {
        assert!(v.get(k).is_some(), "missing {k} in {v}");
    }
    assert_eq!(v["status"] == "ok", v["exit_code"] == 0);
}

#[test]
fn solve_example_one() {
    let f = data("example1.pde");
    let (code, v) = run_json(&["solve", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    check_envelope(&v);
    assert_eq!(
        v["solution"]["expression"],
        "9*y^3*f'''(y) + 27*x*y^2*f''(y) + 36*x^2*y*f'(y) + 16*x^3*f(y)"
    );
    assert_eq!(v["solution"]["verified"], true);
    assert_eq!(v["solution"]["constants"], 0);
}

#[test]
fn trace_lists_every_step() {
    let f = data("example2.pde");
    let (_, v) = run_json(&["solve", "--trace", f.to_str().unwrap()]);
    let t = v["trace"].as_array().unwrap();
    let route: Vec<&str> = t.iter().map(|e| e["from"].as_str().unwrap()).collect();
    assert_eq!(route, ["3E3", "E2+E3", "2E2"]);
    assert_eq!(t[2]["branch"], "Υ22^b");
}

#[test]
fn frobenius_first_step() {
    let f = data("example3.pde");
    let (code, v) = run_json(&["laplace", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["step"]["kind"], "frobenius");
    assert_eq!(v["step"]["branch"], "Υ23^2a");
}

#[test]
fn incompatible_system_exits_four() {
    let f = scratch("inc.pde", "u_xx = 0\nu_xy = u\n");
    let (code, v) = run_json(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code, 4);
    check_envelope(&v);
    assert_eq!(v["analysis"]["compatible"], false);
    assert_eq!(v["analysis"]["witness"]["order"], 1);
    assert_eq!(v["diagnostics"][0]["code"], "incompatible");
}

#[test]
fn parse_errors_exit_two() {
    let f = scratch("bad.pde", "u_x * u_y = 0\n");
    let (code, v) = run_json(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["diagnostics"][0]["code"], "parse_error");
    let (code, _) = run(&["analyze", "/nonexistent/file.pde"]);
    assert_eq!(code, 2);
}

#[test]
fn wrong_class_exits_three() {
    let f = scratch("e2.pde", "u_xy = 0\n");
    let (code, v) = run_json(&["solve", f.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(v["diagnostics"][0]["code"], "unsupported");
}

#[test]
fn classic_verdicts() {
    let kg = scratch("kg.pde", "u_xy - u = 0\n");
    let (code, v) = run_json(&["classic", kg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["classic"]["status"]["verdict"], "inconclusive");
    assert_eq!(v["classic"]["k"].as_array().unwrap().len(), 10);
    let fac = scratch("fac.pde", "u_xy + y*u_x = 0\n@depth 4\n");
    let (_, v) = run_json(&["classic", fac.to_str().unwrap()]);
    assert_eq!(v["classic"]["status"]["verdict"], "integrable_both_sides");
    assert_eq!(v["classic"]["depth"], 4);
    let (_, v) = run_json(&["classic", "--depth", "2", kg.to_str().unwrap()]);
    assert_eq!(v["classic"]["depth"], 2);
}

#[test]
fn zoo_counts_match_library() {
    let (code, v) = run_json(&["zoo", "--upto", "6"]);
    assert_eq!(code, 0);
    let rows = v["zoo"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let n = r["kappa"].as_u64().unwrap() as u32;
        assert_eq!(r["count"].as_u64().unwrap() as usize, omega_core::zoo::type_count(n));
    }
    let (_, v) = run_json(&["zoo", "--kappa", "3"]);
    let names: Vec<&str> = v["zoo"]["rows"][0]["types"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["type"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["E2+E4", "3E3"]);
}

#[test]
fn batch_mode_reports_each_file() {
    let dir = data("");
    let (code, v) = run_json(&["solve", "--all", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        check_envelope(r);
        assert_eq!(r["solution"]["verified"], true);
    }
}

fn leaves(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                out.push(k.clone());
                leaves(x, out);
            }
        }
        Value::Array(a) => a.iter().for_each(|x| leaves(x, out)),
        Value::String(s) => out.push(s.clone()),
        Value::Null => {}
        other => out.push(other.to_string()),
    }
}

#[test]
fn human_output_carries_every_json_field() {
    for cmd in ["analyze", "solve", "laplace", "invariants"] {
        let f = data("example2.pde");
        let (_, human) = run(&[cmd, f.to_str().unwrap()]);
        let (_, v) = run_json(&[cmd, f.to_str().unwrap()]);
        let mut all = Vec::new();
        leaves(&v, &mut all);
        for s in all {
            assert!(human.contains(&s), "{cmd}: `{s}` missing from human output");
        }
    }
}
