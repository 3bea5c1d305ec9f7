use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const PLANAR: &str = r#"{"n": 2, "B": [["-1"]], "f1": "y1 y2", "f2": ["y1 y2"], "N": 6}"#;
const ISOLATED: &str = r#"{"n": 2, "B": [["-1"]], "f1": "y1 y2", "f2": ["y1^2"], "N": 6}"#;
const SIBLING: &str = r#"{"n": 2, "B": [["-1"]], "f1": "y1 y2 - y1^3", "f2": ["y1^2"], "N": 6}"#;
const RESONANT: &str = r#"{"n": 3, "B": [["1", "0"], ["0", "-1"]], "f1": "0", "f2": ["0", "0"], "N": 4}"#;
const FAMILY: &str = r#"{"n": 2, "ring": "Qt", "m_params": 2, "B": [["-1"]],
    "f1": "t1 y1 y2", "f2": ["t2 y1 y2 + t1 y1^2 y2"], "N": 5}"#;

fn firstint(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_firstint"))
        .args(args)
        .current_dir(dir)
        .env_remove("FIRSTINT_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn write_input(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn integral_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "planar.json", PLANAR);
    let out = firstint(dir.path(), &["integral", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    assert_eq!(v["command"], "integral");
    assert_eq!(v["residual"]["vanishes_through"], 6);
    assert!(v["H"]["literal"].as_str().unwrap().starts_with("1 * y1 + 1 * y1 y2"));
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let iso = write_input(dir.path(), "iso.json", ISOLATED);
    let sib = write_input(dir.path(), "sib.json", SIBLING);
    let res = write_input(dir.path(), "res.json", RESONANT);
    let bad = write_input(dir.path(), "bad.json", r#"{"n": 2, "B": [["-1"]], "f1": "y1 +* y2", "f2": ["0"], "N": 4}"#);

    let out = firstint(dir.path(), &["check", "--input", &iso]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out.stdout)["verdict"]["degree"], 3);
    assert_eq!(firstint(dir.path(), &["integral", "--input", &iso]).status.code(), Some(3));

    assert_eq!(firstint(dir.path(), &["integral", "--input", &sib]).status.code(), Some(0));

    let out = firstint(dir.path(), &["check", "--input", &res]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stdout)["error"]["kind"], "ResonanceViolation");

    let out = firstint(dir.path(), &["reduce", "--input", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err = json(&out.stdout);
    assert_eq!(err["error"]["kind"], "ParseError");
    assert!(err["error"]["message"].as_str().unwrap().contains("f1"));
    assert!(!out.stderr.is_empty());

    let missing = dir.path().join("missing.json");
    let out = firstint(dir.path(), &["check", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn degree_override_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "planar.json", PLANAR);
    let target = dir.path().join("h.json");
    let out = firstint(
        dir.path(),
        &["integral", "--input", &input, "--degree", "4", "--output", target.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("h.json"));
    let v = json(&fs::read(&target).unwrap());
    assert_eq!(v["N"], 4);
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "no temporary files left behind: {names:?}");
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("reports");
    fs::create_dir(&outdir).unwrap();
    let input = write_input(dir.path(), "family.json", FAMILY);
    let status = Command::new(env!("CARGO_BIN_EXE_firstint"))
        .args(["scan", "--input", &input, "--grid", "t1=-1:1:3,t2=0:2:2"])
        .env("FIRSTINT_OUTPUT_DIR", &outdir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v = json(&fs::read(outdir.join("family.scan.json")).unwrap());
    assert_eq!(v["scan"]["points"].as_array().unwrap().len(), 6);
    let csv = fs::read_to_string(outdir.join("family.scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t1,t2,class,radius,min_divisor");
    assert_eq!(lines.count(), 6);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "planar.json", PLANAR);
    for cmd in ["check", "reduce", "integral", "conserve"] {
        let a = firstint(dir.path(), &[cmd, "--input", &input]);
        let b = firstint(dir.path(), &[cmd, "--input", &input]);
        assert_eq!(a.status.code(), Some(0), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn scan_job_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "family.json", FAMILY);
    let run = |jobs: &str, name: &str| {
        let target = dir.path().join(name);
        let out = firstint(
            dir.path(),
            &["scan", "--input", &input, "--grid", "t1=-2:2:4,t2=-1:1:4", "--jobs", jobs,
              "--output", target.to_str().unwrap()],
        );
        assert_eq!(out.status.code(), Some(0));
        (fs::read(&target).unwrap(), fs::read(target.with_extension("csv")).unwrap())
    };
    assert_eq!(run("1", "a.json"), run("3", "b.json"));
}

#[test]
fn conserve_rejects_parametric_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "family.json", FAMILY);
    let out = firstint(dir.path(), &["conserve", "--input", &input]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out.stdout).get("error").is_some());
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "planar.json", PLANAR);
    let out = firstint(dir.path(), &["integral", "--input", &input, "--timing"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out.stdout).get("timing_ms").is_some());
}
