use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use forge_core::constructions::{torus_map_44, torus_map_44_skew};
use forge_core::symmetry::quotient_voltages;

fn forge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).args(args).current_dir(dir).env_remove("FORGE_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn build_torus_writes_maniplex_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = forge(&["build", "torus44:8", "--out", "m.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(v["num_flags"], 512);
    assert_eq!(v["rank"], 3);
}

#[test]
fn xi_round_trip_is_polytopal_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&forge(&["build", "xi", "--rank", "4", "--I", "1,2", "--variant", "xiprime", "--out", "x.json"], p)), 0);
    let first = fs::read(p.join("x.voltage.json")).unwrap();
    assert_eq!(code(&forge(&["build", "xi", "--variant", "xiprime", "--out", "y.json"], p)), 0);
    assert_eq!(first, fs::read(p.join("y.voltage.json")).unwrap());
    let o = forge(&["verify", "--premaniplex", "x.json", "--voltage", "x.voltage.json", "--out", "r.json"], p);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["verdict"], "polytopal");
    assert_eq!(r["report"]["intersections"]["tuples"].as_array().unwrap().len(), 64);
}

#[test]
fn negative_voltage_instance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let m = torus_map_44_skew(1, 1).unwrap();
    let aut = forge_core::symmetry::automorphisms(&m);
    let (x, xi, _) = quotient_voltages(&m, aut.elements()).unwrap();
    fs::write(p.join("x.json"), serde_json::to_string(&x).unwrap()).unwrap();
    fs::write(p.join("v.json"), serde_json::to_string(&xi).unwrap()).unwrap();
    let o = forge(&["verify", "--premaniplex", "x.json", "--voltage", "v.json", "--oracle"], p);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["verdict"], "not-polytopal");
    assert_eq!(r["cross_validation"]["agree"], true);
}

#[test]
fn maniplex_oracle_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&forge(&["build", "torus44:2", "--out", "t2.json"], p)), 0);
    assert_eq!(code(&forge(&["verify", "--maniplex", "t2.json", "--oracle"], p)), 0);
    fs::write(p.join("bad.json"), serde_json::to_string(&torus_map_44_skew(1, 0).unwrap()).unwrap()).unwrap();
    assert_eq!(code(&forge(&["verify", "--maniplex", "bad.json", "--oracle"], p)), 1);
    fs::write(p.join("t4.json"), serde_json::to_string(&torus_map_44(4).unwrap()).unwrap()).unwrap();
    assert_eq!(code(&forge(&["--oracle-cap", "10", "verify", "--maniplex", "t4.json", "--oracle"], p)), 2);
}

#[test]
fn input_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("junk.json"), "{\"rank\": 2}").unwrap();
    assert_eq!(code(&forge(&["verify", "--maniplex", "junk.json"], p)), 3);
    assert_eq!(code(&forge(&["verify", "--maniplex", "missing.json"], p)), 3);
    assert_eq!(code(&forge(&["build", "nonsense"], p)), 3);
    assert_eq!(code(&forge(&["build", "--bogus-flag"], p)), 3);
    assert_eq!(code(&forge(&["build", "xi", "--I", "0"], p)), 3);
    assert_eq!(code(&forge(&["verify"], p)), 3);
    assert_eq!(code(&forge(&["--seed", "zz", "build", "square"], p)), 3);
}

#[test]
fn beyond_desk_scale_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&forge(&["build", "xi", "--rank", "5"], dir.path())), 2);
}

#[test]
fn s3_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let o = forge(&["build", "s3"], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["transcript"]["non_invariant"], true);
    assert_eq!(v["transcript"]["not_in_two_closures"], true);
    assert_eq!(v["transcript"]["automorphisms_checked"], 128);
    assert_eq!(v["hat_s_non_invariant"]["holds"], true);
}

#[test]
fn dot_exports() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = forge(&["export", "stg", "--target", "torus44:4"], p);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert_eq!(dot.matches(" semi").count(), 3);
    assert_eq!(dot.lines().filter(|l| l.trim_start().starts_with('v') && l.trim_end().ends_with(';') && !l.contains("--")).count(), 1);

    let o = forge(&["export", "premaniplex", "--target", "2n:5:1,3"], p);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.contains("v0;") && dot.contains("v1;"));
    assert_eq!(dot.matches(" semi").count(), 4);
    for link in ["label=\"0\"", "label=\"2\"", "label=\"4\""] {
        assert!(dot.contains(link), "{dot}");
    }

    let o = forge(&["export", "premaniplex", "--target", "xi"], p);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.contains("v0 -- v1 [label=\"0\"") && dot.contains("v0 -- v1 [label=\"3\""));

    let a = forge(&["export", "stg", "--target", "xi"], p).stdout;
    let b = forge(&["export", "stg", "--target", "xi"], p).stdout;
    assert_eq!(a, b);
}

#[test]
fn suites_are_seeded_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let a = forge(&["--seed", "7", "verify", "--suite", "lemmas"], p);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = Command::new(env!("CARGO_BIN_EXE_forge")).args(["--jobs", "2", "verify", "--suite", "lemmas"]).env("FORGE_SEED", "7").current_dir(p).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["holds"], true);
}

#[test]
fn main_suite_holds() {
    let dir = tempfile::tempdir().unwrap();
    let o = forge(&["verify", "--suite", "paper-main", "--out", "main.json"], dir.path());
    assert_eq!(code(&forge(&["verify", "--suite", "main", "--out", "again.json"], dir.path())), 0);
    assert_eq!(fs::read(dir.path().join("main.json")).unwrap(), fs::read(dir.path().join("again.json")).unwrap());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("main.json")).unwrap()).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["variants"].as_array().unwrap().len(), 2);
    assert_eq!(v["other_I"].as_array().unwrap().len(), 3);
}
