use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fglfans::corpus::corpus_dir;

fn fglfans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fglfans")).args(args).env_remove("FGLFANS_THREADS").output().unwrap()
}

fn fan(name: &str) -> String {
    corpus_dir().join(format!("{name}.json")).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn ranks(o: &Output) -> Vec<u64> {
    json(o)["rows"].as_array().unwrap().iter().map(|r| r["rank"].as_u64().unwrap()).collect()
}

#[test]
fn rank_examples() {
    let o = fglfans(&["rank", "--fan", &fan("p1"), "--degrees", "1", "--trunc", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(ranks(&o), vec![8]);
    assert_eq!(json(&o)["schema_version"], 1);
    let o = fglfans(&["rank", "--fan", &fan("p2"), "--degrees", "1", "--coeff", "additive", "--format", "json"]);
    assert_eq!(ranks(&o), vec![3]);
    let o = fglfans(&["rank", "--fan", &fan("p2"), "--degrees", "0..4", "--trunc", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation bound"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("quasiprojective"));
}

#[test]
fn output_is_deterministic_in_every_format() {
    for format in ["table", "json", "csv"] {
        let args = ["rank", "--fan", &fan("p1xp1"), "--degrees", "-1..2", "--format", format];
        let a = fglfans(&args);
        let b = Command::new(env!("CARGO_BIN_EXE_fglfans")).args(args).env("FGLFANS_THREADS", "1").output().unwrap();
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
    let csv = stdout(&fglfans(&["rank", "--fan", &fan("p1"), "--degrees", "0..1", "--format", "csv"]));
    assert_eq!(csv, "degree,rank,torsion\n0,13,\n1,8,\n");
}

#[test]
fn invalid_fans_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"rank":2,"rays":[[1,0],[-1,0]],"cones":[[0,1]]}"#);
    let o = fglfans(&["rank", "--fan", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("contains a line"));
    let missing = dir.path().join("missing.json");
    assert_eq!(fglfans(&["rank", "--fan", missing.to_str().unwrap()]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_fglfans"))
        .args(["rank", "--fan", &fan("p1")])
        .env("FGLFANS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn basis_examples() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.json", r#"{"rank":2,"rays":[],"cones":[]}"#);
    let o = fglfans(&["basis", "--fan", zero.to_str().unwrap(), "--degrees", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let sections = &json(&o)["degrees"][0]["sections"];
    assert_eq!(sections.as_array().unwrap().len(), 1);
    assert_eq!(sections[0][0]["series"], "1");

    let o = fglfans(&["basis", "--fan", &fan("p1"), "--degrees", "0", "--coeff", "additive", "--format", "json"]);
    let sections = json(&o)["degrees"][0]["sections"].as_array().unwrap().clone();
    assert_eq!(sections.len(), 1);
    assert!(sections[0].as_array().unwrap().iter().all(|v| v["series"] == "1"));

    let o = fglfans(&["basis", "--fan", &fan("quadric"), "--degrees", "1", "--trunc", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let d = &json(&o)["degrees"][0];
    assert_eq!(d["verified"], true);
    assert!(d["rank"].as_u64().unwrap() > 0);
}

#[test]
fn check_descent_examples() {
    let o = fglfans(&["check-descent", "--fan", &fan("a2"), "--ray", "1,1", "--degrees", "0..2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["cartesian"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);

    let o = fglfans(&["check-descent", "--fan", &fan("p2"), "--degrees", "0..1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    for r in json(&o)["reports"].as_array().unwrap() {
        assert_eq!(r["coarse"], r["fine"]);
        assert_eq!(r["coarse"], r["fiber"]);
    }
    assert!(stdout(&fglfans(&["check-descent", "--fan", &fan("p2"), "--degrees", "0"])).contains("identity subdivision"));

    let o = fglfans(&["check-descent", "--fan", &fan("quadric"), "--ray", "1,0", "--degrees", "0..2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all squares Cartesian"));

    let o = fglfans(&["check-descent", "--fan", &fan("a2"), "--ray", "-1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resolve_examples() {
    let steps = |name: &str| {
        let o = fglfans(&["resolve", "--fan", &fan(name), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let v = json(&o);
        assert_eq!(v["smooth"], true);
        v["steps"].as_array().unwrap().len()
    };
    assert_eq!(steps("p2"), 0);
    assert_eq!(steps("quadric"), 1);
    assert!(steps("square") >= 2);
    let o = fglfans(&["resolve", "--fan", &fan("quadric")]);
    assert!(stdout(&o).contains("new ray [1, 0]"));
}

#[test]
fn selftest_minimal_truncation() {
    let o = fglfans(&["selftest", "--trunc", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn selftest_reports_corrupted_fans() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p1.json", &std::fs::read_to_string(fan("p1")).unwrap());
    write(dir.path(), "broken.json", r#"{"rank":2,"rays":[[2,0],[0,1]],"cones":[[0,1],[0,2]]}"#);
    let o = fglfans(&["selftest", "--trunc", "2", "--corpus", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("FAIL broken/valid"), "{text}");
    assert!(text.contains("not primitive") && text.contains("unknown ray"), "{text}");
}

#[test]
fn bless_writes_fixtures_that_then_pass() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["p1", "quadric"] {
        write(dir.path(), &format!("{name}.json"), &std::fs::read_to_string(fan(name)).unwrap());
    }
    let corpus = dir.path().to_str().unwrap();
    let o = fglfans(&["selftest", "--trunc", "2", "--corpus", corpus]);
    assert_eq!(o.status.code(), Some(4), "missing fixtures fail");
    let o = fglfans(&["selftest", "--trunc", "2", "--corpus", corpus, "--bless"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("quadric.ranks.json").exists());
    let o = fglfans(&["selftest", "--trunc", "2", "--corpus", corpus]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
