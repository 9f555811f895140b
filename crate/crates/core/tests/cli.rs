use std::path::Path;
use std::process::{Command, Output};

use cliffnet::pencil::InvariantPencil;
use serde_json::Value;

const SEED_42_DIGEST: &str = "70a43c773b0f7917b7c2a95929c018bdf5707e7280bdc41cfc189ad32b0e9bab";

fn cliffnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffnet")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn gen(seed: &str, out: &Path) -> Output {
    cliffnet(&["gen", "--seed", seed, "-o", out.to_str().unwrap()])
}

#[test]
fn gen_is_deterministic_and_matches_golden_digest() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let first = gen("42", &a);
    assert_eq!(code(&first), 0);
    assert_eq!(code(&gen("42", &b)), 0);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(String::from_utf8_lossy(&first.stdout).trim(), SEED_42_DIGEST);
    let p = InvariantPencil::from_json_str(&String::from_utf8(ta).unwrap()).unwrap();
    assert_eq!(p.digest(), SEED_42_DIGEST);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    assert_eq!(code(&cliffnet(&["gen", "--seed", "1", "--bound", "0", "-o", out.to_str().unwrap()])), 2);
    assert_eq!(code(&cliffnet(&["check", dir.path().join("missing.json").to_str().unwrap()])), 2);
    assert_eq!(code(&cliffnet(&["check", "bogus"])), 2);
    assert_eq!(code(&cliffnet(&["check", "bogus", "x.json"])), 2);
    assert_eq!(code(&cliffnet(&["check", "prop3.9-phi"])), 2);
    assert_eq!(code(&cliffnet(&["check", "prop4.9-segre", "--primes", "4"])), 2);
    assert_eq!(code(&cliffnet(&["check", "prop4.9-segre", "--points", "0"])), 2);
    assert_eq!(code(&cliffnet(&["frobnicate"])), 2);
    assert_eq!(code(&cliffnet(&["--help"])), 0);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"not\": \"an instance\"}").unwrap();
    assert_eq!(code(&cliffnet(&["check", garbage.to_str().unwrap()])), 2);
}

#[test]
fn instance_free_checks_run_alone() {
    for id in ["prop4.9-segre", "prop4.8-m0-matrix", "prop2.3-stabilizer", "prop2.8-stabilizer"] {
        let o = cliffnet(&["check", id, "--json"]);
        assert_eq!(code(&o), 0, "{id}: {}", String::from_utf8_lossy(&o.stdout));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["status"], "pass");
        assert_eq!(v["checks"][0]["id"], id);
    }
}

#[test]
fn single_check_on_an_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("a.json");
    assert_eq!(code(&gen("42", &inst)), 0);
    let report = dir.path().join("r.json");
    let o = cliffnet(&["check", "prop3.9-phi", inst.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["instance_digest"], SEED_42_DIGEST);
    assert_eq!(v["checks"].as_array().unwrap().len(), 1);
}

#[test]
fn degenerate_instance_fails_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("diag.json");
    std::fs::write(&inst, InvariantPencil::diagonal().to_json_string()).unwrap();
    let o = cliffnet(&["check", "prop2.2-smoothness", inst.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "fail");
    let check = &v["checks"][0];
    assert_eq!(check["id"], "prop2.2-smoothness");
    assert_eq!(check["status"], "fail");
    assert!(!check["witnesses"].as_array().unwrap().is_empty());
}
