use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(name: &str) -> String {
    root().join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spantree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spantree-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn count_k4_file() {
    let (code, v) = json(&["count", "--input", &data("k4.rot"), "--oracles"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["t"], "16");
    assert_eq!(v["result"]["oracles"]["enumeration"]["t"], "16");
    assert_eq!(v["result"]["oracles"]["deletion_contraction"]["t"], "16");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["config"]["command"]["subcommand"], "count");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn count_generated_icosahedron() {
    let (code, v) = json(&["count", "--family", "icosahedron"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["t"], "5184000");
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(run(&["count"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--family", "torus:3,3"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--input", "/nonexistent/x.rot"]).status.code(), Some(2));
    let dir = scratch_dir("bad");
    let bad = dir.join("dup.rot");
    std::fs::write(&bad, "2 1\n0: 1 1\n1: 0\n").unwrap();
    let out = run(&["count", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(run(&["asymptotics", "--beta", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--family", "cube", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn pnc_exact_and_sampled() {
    let (code, v) = json(&["pnc", "--family", "tetrahedron", "--exact", "--samples", "20000", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["exact"]["pnc"], "16/27");
    assert_eq!(v["result"]["exact"]["identity_holds"], true);
    assert_eq!(v["result"]["sampled"]["within_4_sigma"], true);
    assert_eq!(run(&["pnc", "--family", "cube"]).status.code(), Some(2));
}

#[test]
fn oracle_signatures_and_bound() {
    let (code, v) = json(&["oracle", "--family", "tetrahedron", "--orderings", "20"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["passed"], true);

    let (code, v) = json(&["signatures", "--family", "octahedron", "--variant", "general"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["primal"]["all_hold"], true);
    assert_eq!(v["result"]["edge_total"], 12);
    assert_eq!(v["result"]["triangle_total"], 8);

    let (code, v) = json(&["bound", "--family", "dodecahedron", "--variant", "r5"]);
    assert_eq!(code, 0);
    assert!(v["result"]["report"]["slack"].as_f64().unwrap() > 0.0);

    // A triangulation is outside the no-triangle variant.
    assert_eq!(run(&["bound", "--family", "icosahedron", "--variant", "r4"]).status.code(), Some(2));
}

#[test]
fn tabulated_r4_certificate_is_marginally_infeasible() {
    let (code, v) = json(&["verify-dual", "--cert", &data("certificates/r4.json")]);
    assert_eq!(code, 1);
    let max_lhs = v["result"]["max_lhs"].as_f64().unwrap();
    assert!(max_lhs > 2.9e-7 && max_lhs < 3.0e-7, "{max_lhs}");
    assert_eq!(v["result"]["argmax"], "(4,4,(4,4,4),(4,4,4))");
}

#[test]
fn solved_r4_certificate_round_trips_through_a_file() {
    let dir = scratch_dir("solve");
    let cert = dir.join("r4.json");
    let (code, v) = json(&["solve-dual", "--variant", "R4", "--out", cert.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    let lambda3 = v["result"]["solve"]["certificate"]["lambda"][2].as_f64().unwrap();
    assert!((lambda3 - 0.614264).abs() < 1e-3);
    assert_eq!(v["result"]["verification"]["feasible"], true);
    let (code, v) = json(&["verify-dual", "--cert", cert.to_str().unwrap(), "--tail"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["tails_passed"], true);
}

#[test]
fn asymptotics_table_formats() {
    let (code, v) = json(&["asymptotics"]);
    assert_eq!(code, 0);
    let base = v["result"]["forest"]["base"].as_f64().unwrap();
    assert!(base > 6.48 && base < 6.50);
    let out = run(&["asymptotics", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "formula,name,note,value");
    assert_eq!(lines.len(), 9);
    let out = run(&["asymptotics", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: pass"));
    assert!(text.contains(&format!("base: {base}")));
}

#[test]
fn family_emits_rot_files_and_growth_csv() {
    let dir = scratch_dir("family");
    let (code, v) = json(&["family", "wrapped_tri_grid:3,6", "cube", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    let file = v["result"]["rows"][0]["file"].as_str().unwrap();
    let text = std::fs::read_to_string(file).unwrap();
    assert!(text.starts_with("18 "));
    let (code, count) = json(&["count", "--input", file]);
    assert_eq!(code, 0);
    assert!(count["result"]["t"].as_str().unwrap().parse::<u64>().unwrap() > 0);

    let out = run(&["family", "cube", "octahedron", "--growth", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(lines[0], ["label", "m", "n", "nth_root", "t"]);
    assert_eq!(lines[1][..3], ["cube", "12", "8"]);
    assert_eq!(lines[2][..3], ["octahedron", "12", "6"]);
    for (row, n) in [(1, 8.0), (2, 6.0)] {
        assert_eq!(lines[row][4], "384");
        let root: f64 = lines[row][3].parse().unwrap();
        assert!((root - 384f64.powf(1.0 / n)).abs() < 1e-12);
    }
}

#[test]
fn reports_are_reproducible_and_thread_independent() {
    let a = run(&["verify-dual", "--builtin", "GEN3", "--threads", "1"]);
    let b = run(&["verify-dual", "--builtin", "GEN3", "--threads", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["verify-dual", "--builtin", "GEN3", "--threads", "3"]);
    let va: Value = serde_json::from_slice(&a.stdout).unwrap();
    let vc: Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(va["result"], vc["result"]);
    assert_eq!(vc["config"]["threads"], 3);
}
