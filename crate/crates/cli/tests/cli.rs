use std::path::Path;
use std::process::{Command, Output};

use toeplitz_pnt::toeplitz::parse_word;
use toeplitz_pnt::ToeplitzSkeleton;

fn tpnt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpnt"))
        .args(args)
        .output()
        .expect("tpnt runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr record");
    serde_json::from_str(line).expect("stderr record is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_theorem_a_passes() {
    let dir = tempfile::tempdir().unwrap();
    let sk = dir.path().join("a.sk");
    let out = tpnt(&[
        "construct",
        "--theorem",
        "A",
        "--c",
        "2",
        "--stages",
        "3",
        "--seed",
        "0",
        "--out",
        path_str(&sk),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&sk).unwrap();
    let skeleton = ToeplitzSkeleton::from_text(&text).unwrap();
    assert_eq!(skeleton.period(2), 30030);
    let certs = std::fs::read_to_string(dir.path().join("a.sk.certificates.jsonl")).unwrap();
    assert!(certs.lines().all(|l| l.contains("\"pass\":true")));

    let again = dir.path().join("b.sk");
    tpnt(&[
        "construct",
        "--theorem",
        "A",
        "--c",
        "2",
        "--stages",
        "3",
        "--seed",
        "0",
        "--out",
        path_str(&again),
    ]);
    assert_eq!(std::fs::read(&sk).unwrap(), std::fs::read(&again).unwrap());

    let val = tpnt(&["validate", "--skeleton", path_str(&sk)]);
    assert!(val.status.success());
    let recomputed = String::from_utf8(val.stdout).unwrap();
    assert!(certs.lines().all(|l| recomputed.lines().any(|r| r == l)));
}

#[test]
fn validate_names_violated_condition() {
    let dir = tempfile::tempdir().unwrap();
    let mut sk = ToeplitzSkeleton::new(
        "01",
        vec![
            parse_word("01", "?").unwrap(),
            parse_word("01", "0?????").unwrap(),
        ],
    )
    .unwrap();
    sk.set_meta("theorem", "A");
    sk.set_meta("growth", 2);
    let path = dir.path().join("bad.sk");
    std::fs::write(&path, sk.to_text().unwrap()).unwrap();
    let out = tpnt(&["validate", "--skeleton", path_str(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let rec = stderr_json(&out);
    let failed = rec["failure"]["failed"].as_array().unwrap();
    assert!(failed.iter().any(|f| f["condition"] == "t3"), "{rec}");
}

#[test]
fn zero_n_is_a_schema_error() {
    let out = tpnt(&["average", "--kind", "primes", "--N", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let rec = stderr_json(&out);
    assert_eq!(rec["error"]["kind"], "config");
    assert!(out.stdout.is_empty());
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let sk = dir.path().join("p.sk");
    let periodic = ToeplitzSkeleton::new("01", vec![parse_word("01", "01").unwrap()]).unwrap();
    std::fs::write(&sk, periodic.to_text().unwrap()).unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"skeleton":"{}","kind":"poly","N":[10],"r":[5]}}"#,
            path_str(&sk)
        ),
    )
    .unwrap();
    let out = tpnt(&[
        "--config",
        path_str(&cfg),
        "average",
        "--kind",
        "primes",
        "--N",
        "100",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("kind,N,r,value,normalization,predicted,error_bound")
    );
    // primes up to 100 shifted by 5: only 2 lands on an odd position
    assert_eq!(lines.next(), Some("primes,100,5,0.92,25,,"));
    assert!(csv.contains("# config_sha256="));
    assert!(csv.contains("# core_version="));

    std::fs::write(&cfg, r#"{"unknown":1}"#).unwrap();
    let out = tpnt(&["--config", path_str(&cfg), "average"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn residues_table() {
    let out = tpnt(&["residues", "--poly", "m^2", "--from", "1", "--to", "8"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    // squares mod 8: 0, 1, 4; residue 1 is hit four times
    assert!(csv.lines().any(|l| l == "8,3,4,1,2,true"), "{csv}");
}
