//! End-to-end tests of the binary: the documented exit codes, byte-identical
//! deterministic output, and file round trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_addcomb"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmpdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("addcomb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gen_writes_the_documented_format() {
    let out = run(&[
        "gen",
        "--p",
        "101",
        "--kind",
        "ap",
        "--params",
        "start=0,diff=1,len=10",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p=101"));
    let elems: Vec<&str> = lines.collect();
    assert_eq!(
        elems,
        vec!["0", "1", "2", "3", "4", "5", "6", "7", "8", "9"]
    );
}

#[test]
fn gen_rejects_bad_params() {
    let out = run(&[
        "gen",
        "--p",
        "101",
        "--kind",
        "ap",
        "--params",
        "start=0,diff=0,len=10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["gen", "--p", "101", "--kind", "nonsense", "--params", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_round_trip_and_exit_codes() {
    let dir = tmpdir();
    let set_path = dir.join("ap.set");
    let out = run(&[
        "gen",
        "--p",
        "4001",
        "--kind",
        "ap",
        "--params",
        "start=0,diff=1,len=64",
        "--out",
        set_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&[
        "decompose",
        "--set",
        set_path.to_str().unwrap(),
        "--f",
        "x^2+y",
        "--json",
        "--deterministic",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["results"]["a_size"], 64);
    assert!(v["timings"].is_null());
    assert_eq!(v["argv"][1], "decompose");
    assert_eq!(v["reports"][0]["name"], "decomposition_post_condition");
    assert_eq!(v["reports"][0]["pass"], true);

    // degenerate polynomial: exit 2
    let out = run(&[
        "decompose",
        "--set",
        set_path.to_str().unwrap(),
        "--f",
        "x^2+2*x*y+y^2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deterministic_outputs_are_byte_identical() {
    let a = run(&[
        "sweep",
        "--sizes",
        "16,32",
        "--kind",
        "apgp",
        "--p",
        "4001",
        "--deterministic",
    ]);
    let b = run(&[
        "sweep",
        "--sizes",
        "16,32",
        "--kind",
        "apgp",
        "--p",
        "4001",
        "--deterministic",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let a = run(&[
        "verify",
        "--suite",
        "constant-free",
        "--instances",
        "2",
        "--corpus-seed",
        "3",
    ]);
    let b = run(&[
        "verify",
        "--suite",
        "constant-free",
        "--instances",
        "2",
        "--corpus-seed",
        "3",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_emits_csv_with_header() {
    let out = run(&[
        "sweep",
        "--sizes",
        "16,32",
        "--kind",
        "ap",
        "--p",
        "4001",
        "--deterministic",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,set_size,e_s,e_f_t,ratio,seconds");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("16,16,"));
    // non-ascending sizes are rejected
    let out = run(&["sweep", "--sizes", "32,16", "--kind", "ap", "--p", "4001"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_streams_json_lines_and_exit_codes() {
    let out = run(&["verify", "--suite", "constant-free", "--instances", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in [
            "name",
            "lhs",
            "rhs",
            "constant",
            "hypothesis_flags",
            "pass",
            "inputs_digest",
        ] {
            assert!(v.get(key).is_some(), "missing key {key} in {line}");
        }
        assert_eq!(v["pass"], true);
    }

    let out = run(&["verify", "--suite", "reports", "--instances", "10"]);
    assert!(out.status.success(), "report suite never fails the run");

    let out = run(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expsum_and_littlewood() {
    let dir = tmpdir();
    let qr = dir.join("qr7.set");
    assert!(run(&[
        "gen",
        "--p",
        "7",
        "--kind",
        "gp",
        "--params",
        "start=1,ratio=2,len=3",
        "--out",
        qr.to_str().unwrap(),
    ])
    .status
    .success());

    let out = run(&[
        "expsum",
        "--S",
        qr.to_str().unwrap(),
        "--T",
        qr.to_str().unwrap(),
        "--bound",
        "vinogradov",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("4.242641"),
        "|3(e7(1)+e7(2)+e7(4))| = 3 sqrt 2"
    );
    assert!(text.contains("pass = true"));

    let out = run(&[
        "expsum",
        "--s",
        qr.to_str().unwrap(),
        "--t",
        qr.to_str().unwrap(),
        "--bound",
        "bogus",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let interval = dir.join("interval.set");
    assert!(run(&[
        "gen",
        "--p",
        "101",
        "--kind",
        "interval",
        "--params",
        "start=0,len=32",
        "--out",
        interval.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&["littlewood", "--set", interval.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    let l1 = v["results"]["l1"].as_f64().unwrap();
    assert!((l1 - 2.395458344775467).abs() < 1e-6);
}

#[test]
fn orbit_generation_feeds_the_pipeline() {
    let dir = tmpdir();
    let orbit_path = dir.join("orbit.set");
    assert!(run(&[
        "gen",
        "--p",
        "4001",
        "--kind",
        "orbit",
        "--params",
        "f=x^2+1,u=0,cap=4001",
        "--out",
        orbit_path.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&[
        "decompose",
        "--set",
        orbit_path.to_str().unwrap(),
        "--f",
        "x^2+y",
        "--json",
        "--deterministic",
    ]);
    assert!(out.status.success());
}
