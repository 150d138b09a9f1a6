use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kuniform(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kuniform")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_matching_pennies_half() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("mp.json"), r#"{"n":2,"m":2,"payoffs":[1,0,0,1,0,1,1,0]}"#).unwrap();
    std::fs::write(dir.path().join("half.json"), r#"{"strategies":[{"probs":[0.5,0.5]},{"probs":[0.5,0.5]}]}"#)
        .unwrap();
    let out = kuniform(dir.path(), &["verify", "--game", "mp.json", "--profile", "half.json", "--epsilon", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["command"], "verify");
    assert_eq!(report["result"]["max_regret"], 0.0);
    assert_eq!(report["result"]["passed"], true);
}

#[test]
fn xor_dynamics_yields_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = kuniform(dir.path(), &["gen", "xor", "--kappa", "3", "--out", "xor3.spec"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dir.path().join("xor3.spec")).unwrap().trim(), "xor:kappa=3");
    let out = kuniform(
        dir.path(),
        &["dynamics", "--game", "xor3.spec", "--T", "100", "--epsilon", "0.25", "--seed", "7", "--out", "dyn.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("dyn.json"));
    let audit = &report["result"]["trials"][0]["audit"];
    assert!(!audit["certificates"].as_array().unwrap().is_empty());
    assert_eq!(audit["failures"], 0);
    let csv = std::fs::read_to_string(dir.path().join("dyn.csv")).unwrap();
    assert!(csv.starts_with("seed,t_hit,t_max\n"));
}

#[test]
fn disc_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("id3.txt"), "3 3\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let out = kuniform(dir.path(), &["disc", "--matrix", "id3.txt", "--method", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["disc"], 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| kuniform(dir.path(), args).status.code();
    assert_eq!(code(&["verify", "--game", "nope:x=1"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["gridsearch", "--game", "xor:kappa=2", "--k", "1", "--epsilon", "x"]), Some(2));
    assert_eq!(code(&["disc", "--matrix", "missing.txt"]), Some(4));
    assert_eq!(code(&["verify", "--game", "random_explicit:n=30,m=3,seed=1"]), Some(3));
    assert_eq!(code(&["gridsearch", "--game", "xor:kappa=3", "--k", "3", "--epsilon", "0.1", "--mode", "scan"]), Some(3));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
}

#[test]
fn scientific_negative_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = kuniform(
        dir.path(),
        &["cube", "--game", "observer:b=16", "--k", "3", "--epsilon", "0.1", "--samples", "5", "--out", "c.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("c.json"));
    assert_eq!(report["anchor"], "observer-lower-bound");
    assert_eq!(report["result"]["certificates"].as_array().unwrap().len(), 5);
}

#[test]
fn sampled_profile_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let game = "random_majority_mp:n=4,m=4,t=2,seed=3";
    let out = kuniform(dir.path(), &["sample", "--game", game, "--k", "400", "--seed", "2", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("s.json"));
    assert_eq!(report["result"]["found"], true);
    std::fs::write(dir.path().join("p.json"), report["result"]["sample"].to_string()).unwrap();
    let out = kuniform(
        dir.path(),
        &["verify", "--game", game, "--profile", "p.json", "--epsilon", "0.1", "--delta", "0.1", "--json", "--out", "v.json"],
    );
    let verified: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verified["result"]["passed"], true);
    assert_eq!(verified, read_json(&dir.path().join("v.json")));
}

#[test]
fn reports_are_reproducible_and_timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str, extra: &[&str]| {
        let mut args = vec!["equiv", "--matrix", "m.txt", "--direction", "rev", "--out", out];
        args.extend_from_slice(extra);
        assert_eq!(kuniform(dir.path(), &args).status.code(), Some(0));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    kuniform(dir.path(), &["gen", "matrix", "--n", "6", "--t", "3", "--seed", "5", "--out", "m.txt"]);
    let a = run("a.json", &["--threads", "1"]);
    let b = run("b.json", &["--threads", "3"]);
    assert_eq!(a, b);
    let timed: Value = serde_json::from_slice(&run("c.json", &["--timing"])).unwrap();
    assert!(timed["elapsed_ms"].as_f64().is_some());
    let untimed: Value = serde_json::from_slice(&a).unwrap();
    assert!(untimed.get("elapsed_ms").is_none());
}

#[test]
fn gen_writes_loadable_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    kuniform(dir.path(), &["gen", "explicit", "--n", "3", "--m", "2", "--seed", "4", "--out", "g.json"]);
    let out = kuniform(dir.path(), &["gridsearch", "--game", "g.json", "--k", "2", "--epsilon", "0.5", "--mode", "scan"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["scanned"], 27);
    let out = kuniform(dir.path(), &["gen", "observer", "--b", "8", "--observers", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "observer:b=8,observers=3,seed=0,w=1.0");
}
