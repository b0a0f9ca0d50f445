use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::Registry;
use serde_json::Value;

use sandpile_core::geometry::MPolyform;

const BASE: &str = "https://schemas.invalid/sandpile/";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sandpile")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn load(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(schema_dir().join(name)).unwrap()).unwrap()
}

/// Validate `doc` against a shipped schema.
fn assert_schema(name: &str, doc: &Value) {
    let registry = Registry::new()
        .add(format!("{BASE}certificate.schema.json"), load("certificate.schema.json"))
        .unwrap()
        .prepare()
        .unwrap();
    let validator = jsonschema::options()
        .with_registry(&registry)
        .with_base_uri(format!("{BASE}{name}"))
        .build(&load(name))
        .unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_str(&ok(&all)).unwrap()
}

#[test]
fn group_orders() {
    for (spec, order) in [("square:2", "4"), ("square:3", "192"), ("square:4", "100352"), ("square:6", "32565539635200")] {
        let v = json(&["group", spec]);
        assert_schema("group.schema.json", &v);
        assert_eq!(v["order"], order, "{spec}");
    }
    let v = json(&["--verify", "group", "square:4"]);
    let factors: Vec<&str> = v["invariant_factors"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(factors, ["4", "112", "224"]);
    let text = ok(&["group", "square:4"]);
    assert!(text.contains("order: 100352"), "{text}");
}

#[test]
fn identity_renders() {
    assert_eq!(ok(&["identity", "square:2"]).trim(), "0");
    let v = json(&["--verify", "identity", "square:4"]);
    assert_schema("config.schema.json", &v);
    assert_eq!(v["chips"].as_array().unwrap().len(), 9);
    let pgm = ok(&["--format", "pgm", "identity", "square:6"]);
    let mut lines = pgm.lines();
    assert_eq!(lines.next(), Some("P2"));
    assert_eq!(lines.next(), Some("5 5"));
    assert_eq!(lines.next(), Some("255"));
    for level in lines.flat_map(str::split_whitespace) {
        assert!(["0", "85", "170", "255"].contains(&level), "{level}");
    }
}

#[test]
fn basis_and_potential_matrix() {
    let v = json(&["--verify", "basis", "square:5"]);
    assert_schema("basis.schema.json", &v);
    assert_eq!(v["functions"], 12);
    assert_eq!(v["det"].as_str().unwrap().trim_start_matches('-'), v["order"].as_str().unwrap());
    assert_eq!(json(&["basis", "square:4"])["order"], "100352");
}

#[test]
fn tiling_search() {
    let v = json(&["tile", "square:3", "square:3"]);
    assert_schema("tile.schema.json", &v);
    assert_eq!(v["count"], 8);

    let v = json(&["tile", "triangle:2", "triangle:4"]);
    assert!(v["count"].as_u64().unwrap() >= 1);

    let dir = tempfile::tempdir().unwrap();
    let hat = dir.path().join("hat.txt");
    let mut text = MPolyform::square(2).unwrap().to_text();
    text.push_str("2 0 W\n");
    fs::write(&hat, text).unwrap();
    let v = json(&["tile", "square:2", hat.to_str().unwrap()]);
    assert_eq!(v["count"], 0);
}

fn write_certificate(dir: &Path, cert: &Value) -> PathBuf {
    let path = dir.join("cert.json");
    fs::write(&path, serde_json::to_string_pretty(cert).unwrap()).unwrap();
    path
}

#[test]
fn monomorphism_verification() {
    let tiles = json(&["tile", "triangle:2", "triangle:4"]);
    let cert = tiles["certificates"][0].clone();
    assert_schema("certificate.schema.json", &cert);
    let dir = tempfile::tempdir().unwrap();
    let path = write_certificate(dir.path(), &cert);

    let v = json(&["mono", path.to_str().unwrap()]);
    assert_schema("mono.schema.json", &v);
    assert_eq!(v["injective"], true);
    assert_eq!(v["image_order"], "56");
    assert_eq!(v["source_order"], "56");

    // Swap a rotation for a reflection in one placement.
    let mut bad = cert.clone();
    let p = &mut bad["placements"][1];
    p["reflect"] = Value::Bool(!p["reflect"].as_bool().unwrap());
    let path = write_certificate(dir.path(), &bad);
    let o = run(&["--format", "json", "mono", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_schema("mono.schema.json", &v);
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());

    // Flipped signs keep the tiling but break the map.
    let mut bad = cert.clone();
    for p in bad["placements"].as_array_mut().unwrap() {
        p["sign"] = Value::from(1);
    }
    let path = write_certificate(dir.path(), &bad);
    assert_eq!(run(&["mono", path.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn xy_dynamics_on_five_by_five() {
    let v = json(&["dynamics", "square:6", "xy", "0", "1/3", "2/3", "4/3"]);
    assert_schema("dynamics.schema.json", &v);
    assert_eq!(v["subgroup_order"], "3");
    let frames = v["frames"].as_array().unwrap();
    for f in frames {
        assert_eq!(f["exact"], true);
        assert_eq!(f["in_subgroup"], true);
    }
    let chips: Vec<&Value> = frames.iter().map(|f| &f["chips"]).collect();
    assert_eq!(chips[0], &json(&["identity", "square:6"])["chips"]);
    assert_ne!(chips[0], chips[1]);
    assert_ne!(chips[1], chips[2]);
    assert_ne!(chips[0], chips[2]);
    assert_eq!(chips[1], chips[3]);

    let v = json(&["dynamics", "square:5", "pi", "1/5"]);
    assert_eq!(v["frames"][0]["in_subgroup"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dynamics", "square:6", "nope", "0"]).status.code(), Some(2));
    assert_eq!(run(&["group", "/nonexistent/polyform.txt"]).status.code(), Some(2));
    assert_eq!(run(&["group", "square:0"]).status.code(), Some(2));
    assert_eq!(run(&["--format", "pgm", "group", "square:3"]).status.code(), Some(2));
    assert_eq!(run(&["mono", "/nonexistent/cert.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--format", "json", "tile", "triangle:2", "triangle:4"][..],
        &["--format", "json", "basis", "square:6"][..],
        &["--seed", "3", "--format", "json", "group", "square:5"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.txt");
    let o = run(&["--out", path.to_str().unwrap(), "identity", "square:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap().trim(), "0");
}
