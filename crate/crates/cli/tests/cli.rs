use std::path::Path;
use std::process::{Command, Output};

use osx_core::completion::{equals, CompletionPoint};
use osx_core::fixtures::named_completion_points;
use osx_core::marked_graph::{GraphJson, LengthPolicy};
use serde_json::Value;

fn osx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osx")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = osx(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = osx(&["fixtures", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    dir
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn distance_of_the_rose_pair() {
    let d = fixtures();
    let v = json(&["distance", &p(d.path(), "rose.json"), &p(d.path(), "rose2.json"), "--json"]);
    assert_eq!(v["factor"], "3/2");
    assert_eq!(v["witness"], "a");
    assert!((v["log"].as_f64().unwrap() - 1.5f64.ln()).abs() < 1e-9);
    let back = json(&["distance", &p(d.path(), "rose2.json"), &p(d.path(), "rose.json"), "--json"]);
    assert_eq!(back["factor"], "2");
    let sym = json(&["distance", &p(d.path(), "rose.json"), &p(d.path(), "rose2.json"), "--sym", "--json"]);
    assert_eq!(sym["factor"], "3");
}

#[test]
fn length_of_a_word() {
    let d = fixtures();
    let o = osx(&["length", &p(d.path(), "rose.json"), "-w", "abaB"]);
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn extended_distances() {
    let d = fixtures();
    let v = json(&["cdistance", &p(d.path(), "rose-a.json"), &p(d.path(), "rose.json"), "--json"]);
    assert_eq!(v["factor"], "INFINITE");
    assert_eq!(v["log"], Value::Null);
    let v = json(&["cdistance", &p(d.path(), "rose.json"), &p(d.path(), "rose-a.json"), "--json"]);
    assert_eq!(v["factor"], "2");
    assert_eq!(v["witness"], "a");
}

#[test]
fn json_output_is_deterministic() {
    let d = fixtures();
    for args in [
        vec!["verify", "--suite", "2,3,4", "--seed", "7", "--json"],
        vec!["candidates", &p(d.path(), "split-a-b.json"), "--json"],
        vec!["strictness", "--i", "5", "--m", "10", "--json"],
    ] {
        let (a, b) = (osx(&args), osx(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn fixtures_round_trip() {
    let d = fixtures();
    for (name, point) in named_completion_points() {
        let text = std::fs::read_to_string(d.path().join(format!("{name}.json"))).unwrap();
        let g = GraphJson::parse(&text).unwrap().to_marked(LengthPolicy::NonNegative).unwrap();
        let back = CompletionPoint::from_blow_up(g).unwrap();
        assert!(equals(&back, &point).unwrap(), "{name}");
    }
}

#[test]
fn fixture_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_osx"))
        .args(["fixtures", "--rank", "3"])
        .env("OSX_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("rose3.json").exists());
    assert!(!dir.path().join("rose.json").exists());
}

#[test]
fn exit_codes() {
    let d = fixtures();
    assert_eq!(osx(&["distance", "missing.json", "missing.json"]).status.code(), Some(1));
    let bad = d.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(osx(&["length", bad.to_str().unwrap(), "-w", "a"]).status.code(), Some(1));
    // zero-length edge is not a point of Outer Space
    let o = osx(&["distance", &p(d.path(), "rose.json"), &p(d.path(), "rose-a.json"), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "domain");
    assert_eq!(osx(&["distance", &p(d.path(), "rose.json"), &p(d.path(), "rose3.json")]).status.code(), Some(2));
    assert_eq!(osx(&["length", &p(d.path(), "rose.json"), "-w", "ac"]).status.code(), Some(1));
    assert_eq!(osx(&["strictness", "--i", "1", "--m", "3"]).status.code(), Some(2));
    assert_eq!(osx(&["pinch", &p(d.path(), "rose.json"), "--edges", "e2", "--schedule", "1/4,1/2"]).status.code(), Some(2));
    assert_eq!(osx(&["bogus"]).status.code(), Some(1));
    assert_eq!(osx(&["--help"]).status.code(), Some(0));
}

#[test]
fn rank_flag_is_enforced() {
    let d = fixtures();
    let o = osx(&["length", &p(d.path(), "rose.json"), "-w", "a", "--rank", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(osx(&["length", &p(d.path(), "rose.json"), "-w", "a", "--rank", "1"]).status.code(), Some(1));
}

#[test]
fn faces_and_collapses() {
    let d = fixtures();
    let v = json(&["facedist", &p(d.path(), "rose.json"), "--subgraph", "e1", "--json"]);
    assert_eq!(v, "2");
    let face = json(&["face", &p(d.path(), "rose.json"), "--keep", "e1", "--json"]);
    let lengths: Vec<&str> = face["edges"].as_array().unwrap().iter().map(|e| e["length"].as_str().unwrap()).collect();
    assert_eq!(lengths, ["1", "0"]);
    let view = json(&["collapse", &p(d.path(), "split-a-b.json"), "--json"]);
    assert_eq!(view["vertices"][0]["group"][0], "a");
    assert_eq!(view["vertices"][1]["group"][0], "b");
    let theta = json(&["collapse", &p(d.path(), "theta.json"), "--edges", "e1", "--json"]);
    assert_eq!(theta["edges"].as_array().unwrap().len(), 2);
    assert_eq!(theta["edges"][0]["length"], "1/2");
}

#[test]
fn pinch_then_check_sequences() {
    let d = fixtures();
    let seq = json(&["pinch", &p(d.path(), "rose.json"), "--edges", "e2", "--schedule", "1/2,1/4,1/8,1/16,1/32,1/64,1/128,1/256", "--json"]);
    let file = d.path().join("seq.json");
    std::fs::write(&file, seq.to_string()).unwrap();
    let f = file.to_str().unwrap();
    let c = json(&["seq", "check", f, "--kind", "cauchy", "--schedule", "1,1/2,1/4", "--json"]);
    assert_eq!(c["verdict"], "HOLDS_ON_WINDOW");
    let a = json(&["seq", "check", f, "--kind", "admissible", "--schedule", "1,1/2", "--json"]);
    assert_eq!(a["verdict"], "HOLDS_ON_WINDOW");
    let e = json(&["seq", "check", f, "--kind", "equiv", "--other", f, "--schedule", "1,1/2", "--json"]);
    assert_eq!(e["verdict"], "HOLDS_ON_WINDOW");
    assert_eq!(e["consistent"], true);
}

#[test]
fn sequence_lists_of_paths() {
    let d = fixtures();
    let list = d.path().join("list.json");
    std::fs::write(&list, r#"["rose.json", "rose2.json", "rose.json", "rose2.json", "rose.json", "rose2.json"]"#).unwrap();
    let c = json(&["seq", "check", list.to_str().unwrap(), "--kind", "cauchy", "--schedule", "1/2", "--json"]);
    assert_eq!(c["verdict"], "FAILS_WITH_WITNESS");
}

#[test]
fn approximation_and_axes() {
    let d = fixtures();
    let y = json(&["approx", &p(d.path(), "rose-a.json"), "--eps", "1/8", "--json"]);
    let lengths: Vec<&str> = y["edges"].as_array().unwrap().iter().map(|e| e["length"].as_str().unwrap()).collect();
    assert_eq!(lengths, ["7/8", "1/8"]);
    let v = json(&["axes", &p(d.path(), "split-a-b.json"), "--words", &p(d.path(), "words.txt"), "--json"]);
    assert_eq!(v["lengths"], serde_json::json!(["0", "0", "2", "2"]));
    let s = json(&["strictness", "--i", "5", "--m", "10", "--json"]);
    assert_eq!(s["t"], "1/41");
    assert_eq!(s["factor_y_x"], "41/40");
    assert_eq!(s["factor_x_y"], "INFINITE");
}

#[test]
fn verify_reports_each_criterion() {
    let v = json(&["verify", "--suite", "2,5", "--json"]);
    assert_eq!(v["total"], 2);
    assert_eq!(v["passed"], 2);
    assert_eq!(v["criteria"][1]["id"], 5);
}
