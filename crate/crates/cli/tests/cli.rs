use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const VC: &str = r#"{"players": 2, "resources": 2, "delays": [[1, 3], [1, 3]],
  "strategy": {"kind": "vertex_cover", "nodes": 2, "edges": [[0, 1]]}}"#;

fn tucg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tucg")).args(args).output().expect("binary runs")
}

fn file(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap().trim().to_string()
}

#[test]
fn solve_nash_single_edge_vertex_cover() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "vc.json", VC);
    let r = report(&tucg(&["solve-nash", s(&inst)]));
    assert_eq!(r["potential"], 2);
    assert_eq!(r["verification"]["nash"], true);
    assert_eq!(r["instance"]["symmetric"], true);
    assert!(r["elapsed_ms"].is_u64());
    assert_eq!(stdout(&tucg(&["solve-nash", s(&inst), "--quiet"])), "2");
    assert_eq!(stdout(&tucg(&["solve-social", s(&inst), "--quiet"])), "2");
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "vc.json", VC);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let a = strip(report(&tucg(&["solve-social", s(&inst)])));
    let b = strip(report(&tucg(&["solve-social", s(&inst)])));
    assert_eq!(a, b);
}

#[test]
fn verify_and_dynamics() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "vc.json", VC);
    let bad = file(&dir, "s.json", r#"{"strategies": [[1, 0], [1, 0]]}"#);
    let r = report(&tucg(&["verify", "--state", s(&bad), s(&inst)]));
    assert_eq!(r["verification"]["nash"], false);
    assert_eq!(r["verification"]["witness"]["deviation"], serde_json::json!([0, 1]));
    assert_eq!(stdout(&tucg(&["verify", "--state", s(&bad), s(&inst), "--quiet"])), "no");

    let r = report(&tucg(&["dynamics", "--state", s(&bad), s(&inst)]));
    assert_eq!(r["termination"], "nash");
    assert_eq!(r["steps"].as_array().unwrap().len(), 1);
    let r = report(&tucg(&["dynamics", "--state", s(&bad), s(&inst), "--max-iters", "0"]));
    assert_eq!(r["termination"], "iteration-cap");

    let infeasible = file(&dir, "x.json", r#"{"strategies": [[0, 0], [1, 0]]}"#);
    assert_eq!(tucg(&["verify", "--state", s(&infeasible), s(&inst)]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let garbage = file(&dir, "g.json", "{ not json");
    assert_eq!(tucg(&["solve-nash", s(&garbage)]).status.code(), Some(1));
    assert_eq!(tucg(&["solve-nash", "/nonexistent/x.json"]).status.code(), Some(1));

    let asym = file(
        &dir,
        "a.json",
        r#"{"players": 2, "resources": 2, "delays": [[1, 3], [1, 3]],
            "strategy": [{"kind": "tu", "matrix": [[1, 0]], "row_lo": [1], "row_hi": [1]},
                         {"kind": "tu", "matrix": [[0, 1]], "row_lo": [1], "row_hi": [1]}]}"#,
    );
    let out = tucg(&["solve-nash", s(&asym)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("asymmetric"));

    let infeasible = file(
        &dir,
        "i.json",
        r#"{"players": 1, "resources": 1, "delays": [[1]],
            "strategy": {"kind": "tu", "matrix": [[1], [1]], "row_lo": [1, null], "row_hi": [null, 0]}}"#,
    );
    assert_eq!(tucg(&["solve-nash", s(&infeasible)]).status.code(), Some(3));

    let concave = file(
        &dir,
        "c.json",
        r#"{"players": 3, "resources": 1, "delays": [[0, 5, 5]],
            "strategy": {"kind": "tu", "matrix": [], "row_lo": [], "row_hi": []}}"#,
    );
    assert_eq!(tucg(&["solve-social", s(&concave)]).status.code(), Some(2));
}

#[test]
fn check_tu_flags_odd_cycle_matrix() {
    let dir = TempDir::new().unwrap();
    let inst = file(
        &dir,
        "t.json",
        r#"{"players": 1, "resources": 3, "delays": [[1], [1], [1]],
            "strategy": {"kind": "tu", "matrix": [[1, 1, 0], [0, 1, 1], [1, 0, 1]],
                         "row_lo": [null, null, null], "row_hi": [1, 1, 1]}}"#,
    );
    let r = report(&tucg(&["check-tu", s(&inst)]));
    assert_eq!(r["totally_unimodular"], false);
    assert_eq!(r["players"][0]["violation"]["determinant"], "2");
    assert_eq!(tucg(&["solve-nash", "--verify-tu", s(&inst)]).status.code(), Some(2));
}

#[test]
fn cardinality_mode_adds_a_note() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "vc.json", VC);
    let r = report(&tucg(&["solve-nash", s(&inst), "--mode", "nash"]));
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);
    assert_eq!(r["verification"]["nash"], true);
}

#[test]
fn gen_reduction_writes_instance_and_mapping() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "f.sat", "vars: 3\n2 : 1 2\n1 : 2 3\n1 : 3 T\n");
    let out = dir.path().join("r.json");
    let map = dir.path().join("m.json");
    let o = tucg(&["gen-reduction", "--kind", "pm-nae2sat", s(&f), "--out", s(&out), "--map", s(&map)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mapping: Value = serde_json::from_str(&std::fs::read_to_string(&map).unwrap()).unwrap();
    assert_eq!(mapping["players"].as_array().unwrap().len(), 3);
    assert_eq!(mapping["kind"], "pm-nae2sat");

    // Dynamics on the gadget game ends in a verified equilibrium.
    let r = report(&tucg(&["dynamics", s(&out)]));
    assert_eq!(r["verification"]["nash"], true);
    assert_eq!(r["instance"]["players"], 3);

    let three = file(&dir, "g.sat", "1 : 1 2 3\n");
    assert_eq!(tucg(&["gen-reduction", "--kind", "pm-nae2sat", s(&three)]).status.code(), Some(1));
    assert!(tucg(&["gen-reduction", "--kind", "pm-nae3sat-social", s(&three)]).status.success());
}

#[test]
fn gen_random_is_seeded_and_solvable() {
    for family in ["interval", "digraph", "bipartite", "matroid"] {
        let a = tucg(&["gen-random", "--seed", "7", "--family", family]);
        let b = tucg(&["gen-random", "--seed", "7", "--family", family]);
        assert_eq!(a.stdout, b.stdout);
        let dir = TempDir::new().unwrap();
        let inst = file(&dir, "r.json", &String::from_utf8(a.stdout).unwrap());
        let out = tucg(&["solve-nash", s(&inst)]);
        // Random interval systems may be empty.
        assert!(matches!(out.status.code(), Some(0 | 3)), "{family}: {}", String::from_utf8_lossy(&out.stderr));
        if out.status.success() {
            let r = report(&out);
            let brute = report(&tucg(&["brute", s(&inst)]));
            assert_eq!(r["potential"], brute["min_potential"]["value"], "{family}");
        }
    }
}
