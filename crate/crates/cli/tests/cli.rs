use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use apd::{parse_perm, Perm};

fn apd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apd")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(out).trim()).expect("stdout is one JSON document")
}

#[test]
fn table_verify_passes_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = apd(&["table", "verify"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 15);
    assert!(text.lines().all(|l| l.starts_with("PASS row ")));
}

#[test]
fn prime_emits_the_quadratic_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let out = apd(&["prime", "--p", "11", "--cert", "cert.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "n=11\n0 7 4 8 5 10 3 2 9 6 1\n");
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cert.json")).unwrap()).unwrap();
    assert_eq!(cert["xi"], 7);
    assert_eq!(cert["verdict"], "pass");

    let bad = apd(&["prime", "--p", "13"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
}

#[test]
fn verify_identity_fails_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("id5.txt"), "n=5\n0 1 2 3 4\n").unwrap();
    let out = apd(&["verify", "--perm", "id5.txt", "--s", "0", "--t", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let cert = json(&out);
    assert_eq!(cert["verdict"], "fail");
    assert_eq!(cert["counterexample"]["a"], 0);
    assert_eq!(cert["counterexample"]["b"], 1);
    assert_eq!(cert["counterexample"]["c"], 2);

    let listed = apd(&["verify", "--perm", "id5.txt", "--patterns", "1:-1,-1:1"], dir.path());
    assert_eq!(listed.status.code(), Some(0));
    assert_eq!(json(&listed)["verdict"], "pass");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(apd(&["verify", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(apd(&["verify", "--perm", "missing.txt", "--s", "0", "--t", "0"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("bad.txt"), "n=3\n0 0 1\n").unwrap();
    let dup = apd(&["verify", "--perm", "bad.txt", "--s", "0", "--t", "0"], dir.path());
    assert_eq!(dup.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&dup.stderr).contains("duplicate image 0"));
    // (s, t) too large for the modulus
    fs::write(dir.path().join("id5.txt"), "n=5\n0 1 2 3 4\n").unwrap();
    assert_eq!(apd(&["verify", "--perm", "id5.txt", "--s", "3", "--t", "0"], dir.path()).status.code(), Some(2));
}

#[test]
fn search_found_and_none() {
    let dir = tempfile::tempdir().unwrap();
    let found =
        apd(&["search", "--n", "9", "--patterns", "0:0,0:2,-1:-2", "--normalize", "--out", "w.txt"], dir.path());
    assert_eq!(found.status.code(), Some(0));
    assert_eq!(json(&found)["outcome"], "found");
    let w = parse_perm(&fs::read_to_string(dir.path().join("w.txt")).unwrap()).unwrap();
    assert_eq!(w.modulus(), 9);

    let none = apd(&["search", "--n", "5", "--patterns", "0:0"], dir.path());
    assert_eq!(none.status.code(), Some(1));
    assert_eq!(json(&none)["outcome"], "exhausted");

    let count =
        apd(&["--threads", "2", "search", "--n", "4", "--patterns", "0:0", "--exhaustive", "--normalize"], dir.path());
    assert_eq!(count.status.code(), Some(0));
    assert!(json(&count)["count"].as_u64().unwrap() > 0);

    let limited = apd(&["search", "--n", "7", "--patterns", "0:0", "--limit", "2"], dir.path());
    assert_eq!(limited.status.code(), Some(1));
    assert_eq!(json(&limited)["outcome"], "limit");
}

#[test]
fn compose_reports_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for row in [1, 2] {
        let out = apd(&["table", "show", &row.to_string()], p);
        assert_eq!(out.status.code(), Some(0));
        fs::write(p.join(format!("row{row}.txt")), out.stdout).unwrap();
    }
    let out = apd(&["compose", "--out", "c.txt", "--s", "1", "--t", "1", "row1.txt", "row2.txt"], p);
    let report = json(&out);
    let composite = parse_perm(&fs::read_to_string(p.join("c.txt")).unwrap()).unwrap();
    assert_eq!(composite.modulus(), 99);
    // rows 1 and 2 destroy 0:0, and the exit status tracks the coverage verdict
    assert!(report["missing_zero"].as_array().unwrap().is_empty());
    let covered = report["uncovered"].as_array().unwrap().is_empty();
    assert_eq!(out.status.code(), Some(if covered { 0 } else { 1 }));

    let clash = apd(&["compose", "--out", "d.txt", "row1.txt", "row1.txt"], p);
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn build_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let master = Perm::from_fn(9, |x| (2 * x + 1) % 9).unwrap();
    fs::write(p.join("m.txt"), apd::render_perm(&master, apd::PermFormat::Text)).unwrap();

    // the affine master is not (1, 2)-almost destroying
    assert_eq!(apd(&["build", "--n", "81", "--master", "m.txt"], p).status.code(), Some(2));

    let out = apd(&["build", "--n", "90", "--master", "m.txt", "--unchecked"], p);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(parse_perm(&stdout(&out)).unwrap().modulus(), 90);

    let out = apd(
        &[
            "--format",
            "json",
            "build",
            "--n",
            "81",
            "--master",
            "m.txt",
            "--t",
            "1",
            "--trace",
            "tr.json",
            "--unchecked",
        ],
        p,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("{\"n\":81,"));
    let trace: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("tr.json")).unwrap()).unwrap();
    assert_eq!(trace["beta4"].as_array().unwrap().len(), 81);
}

#[test]
fn emitted_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["text", "json"] {
        let out = apd(&["--format", fmt, "prime", "--p", "19"], dir.path());
        let text = stdout(&out);
        let perm = parse_perm(&text).unwrap();
        let again = apd::render_perm(&perm, if fmt == "json" { apd::PermFormat::Json } else { apd::PermFormat::Text });
        assert_eq!(again, text);
    }
}

#[test]
fn stats_emits_reproducible_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = apd(&["stats", "--n", "32", "--trials", "20", "--seed", "5"], dir.path());
    let b = apd(&["--threads", "1", "stats", "--n", "32", "--trials", "20", "--seed", "5"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let s = json(&a);
    assert_eq!(s["n"], 32);
    assert_eq!(s["trials"], 20);
}
