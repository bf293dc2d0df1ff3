use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stablered_cli::{run, JobSpec, Report};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn stablered(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stablered"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("STABLERED_THREADS", t);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn without_timing(mut v: serde_json::Value) -> serde_json::Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn success_writes_report_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let dot = dir.path().join("t.dot");
    let input = fixture("elli_c.toml");
    let o = stablered(&["--input", input.to_str().unwrap(), "--out", out.to_str().unwrap(), "--dot", dot.to_str().unwrap(), "--verbose"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["reduction_type"], 3);
    assert!(v["monodromy_bound"]["degree_bound"].is_string());
    assert!(v["monodromy_bound"]["annotations"]["note"].is_string());
    let d = std::fs::read_to_string(&dot).unwrap();
    assert!(d.starts_with("digraph"));
    assert!(d.contains("g=2 d=2/5"), "{d}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("reduction type 3"));
}

#[test]
fn rejected_inputs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let sq = fixture("square.toml");
    let o = stablered(&["--input", sq.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("input rejected"));

    let bad = write(dir.path(), "bad.toml", "f = \"1 + q*X\"\n[field]\np = 2\n");
    let o = stablered(&["--input", &bad], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 4"), "{}", String::from_utf8_lossy(&o.stderr));

    let even = write(dir.path(), "even.json", r#"{"field": {"p": 2}, "f": "1 + X + X^2 + X^3 + X^4"}"#);
    assert_eq!(stablered(&["--input", &even], None).status.code(), Some(1));

    let o = stablered(&["--input", "/nonexistent/job.toml"], None);
    assert_eq!(o.status.code(), Some(1));
    let c = fixture("cubic.toml");
    assert_eq!(stablered(&["--input", c.to_str().unwrap(), "--precision-cap", "x/0"], None).status.code(), Some(1));
}

#[test]
fn internal_limits_exit_2() {
    let c = fixture("elli_c.toml");
    let o = stablered(&["--input", c.to_str().unwrap(), "--precision-cap", "1"], None);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let o = stablered(&["--input", c.to_str().unwrap(), "--max-extension", "4"], None);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn output_independent_of_thread_count() {
    let input = fixture("elli_b.toml");
    let one = stablered(&["--input", input.to_str().unwrap()], Some("1"));
    let four = stablered(&["--input", input.to_str().unwrap()], Some("4"));
    assert_eq!(one.status.code(), Some(0));
    let a: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&four.stdout).unwrap();
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn job_and_report_round_trip() {
    for name in ["cubic.toml", "gud.toml"] {
        let job = JobSpec::from_text(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        assert_eq!(JobSpec::from_text(&job.to_toml()).unwrap(), job);
        assert_eq!(JobSpec::from_text(&serde_json::to_string(&job).unwrap()).unwrap(), job);
        let (r, _) = run(&job).unwrap();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}

#[test]
fn coefficient_list_matches_expression() {
    let a = JobSpec::from_text("f = [\"1\", \"0\", \"0\", \"1\"]\n[field]\np = 2\n").unwrap();
    let b = JobSpec::from_text(&std::fs::read_to_string(fixture("cubic.toml")).unwrap()).unwrap();
    let (ra, _) = run(&a).unwrap();
    let (rb, _) = run(&b).unwrap();
    assert_eq!(ra.monodromy_polynomial, rb.monodromy_polynomial);
    assert_eq!(ra.components, rb.components);
}

#[test]
fn report_keys_match_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json")).unwrap()).unwrap();
    let job = JobSpec::from_text(&std::fs::read_to_string(fixture("elli_c.toml")).unwrap()).unwrap();
    let v = serde_json::to_value(run(&job).unwrap().0).unwrap();
    let obj = v.as_object().unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap()).collect();
    let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    let mut want = required.clone();
    keys.sort();
    want.sort();
    assert_eq!(keys, want);
    for section in ["monodromy_bound", "checks"] {
        for k in schema["properties"][section]["required"].as_array().unwrap() {
            assert!(obj[section].get(k.as_str().unwrap()).is_some(), "{section}.{k}");
        }
    }
    for k in schema["properties"]["components"]["items"]["required"].as_array().unwrap() {
        assert!(obj["components"][0].get(k.as_str().unwrap()).is_some(), "components.{k}");
    }
}
