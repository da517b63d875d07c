use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn skewrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewrel")).args(args).output().expect("binary runs")
}

fn with_data(args: &[&str]) -> Output {
    let owned: Vec<String> = args
        .iter()
        .map(|a| if a.ends_with(".json") { data(a).to_string_lossy().into_owned() } else { a.to_string() })
        .collect();
    let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
    skewrel(&refs)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_accepts_fixtures() {
    for f in ["e1.json", "e2.json", "empty.json", "s3.json"] {
        let out = with_data(&["validate", f]);
        assert_eq!(out.status.code(), Some(0), "{f}");
        assert_eq!(json(&out)["valid"], true);
    }
    assert_eq!(json(&with_data(&["validate", "e1.json"]))["points"], 3);
}

#[test]
fn validate_reports_mutant() {
    let out = with_data(&["validate", "e2_without_h2.json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let first = &v["violations"][0];
    assert_eq!(first["axiom"], "2");
    assert_eq!(first["t"], "1");
    assert_eq!(first["s"], "1");
    assert_eq!(first["witness"]["image"], serde_json::json!(["3"]));
    assert_eq!(first["witness"]["expected"], serde_json::json!([]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("axiom 2 at (t,s)=(1,1)"));
}

#[test]
fn relation_listings() {
    let v = json(&with_data(&["relation", "e1.json"]));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 5);
    assert_eq!(v["classes"], serde_json::json!([["a", "b"], ["c"]]));
    assert_eq!(v["invariant_subsets"], 4);
    let v = json(&with_data(&["relation", "e2.json"]));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 9);
    assert_eq!(v["invariant_subsets"], 2);

    let out = with_data(&["relation", "e1_fixing_c.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fixes c"));
}

#[test]
fn ideal_lattices() {
    let sizes = |f: &str| -> Vec<u64> {
        json(&with_data(&["ideals", f]))["ideals"].as_array().unwrap().iter().map(|i| i["basis_size"].as_u64().unwrap()).collect()
    };
    assert_eq!(sizes("e1.json"), [0, 4, 1, 5]);
    assert_eq!(sizes("e2.json"), [0, 9]);
}

#[test]
fn products() {
    let out = with_data(&["mul", "--algebra", "skew", "e1.json", "e1_skew_a1.json", "e1_skew_b1.json"]);
    assert_eq!(json(&out), serde_json::json!([{ "t": "0", "coeffs": { "a": "1" } }]));
    let out = with_data(&["mul", "--algebra", "rel", "e1.json", "e1_rel_ab.json", "e1_rel_ba.json"]);
    assert_eq!(json(&out), serde_json::json!([{ "x": "a", "y": "a", "value": "1" }]));
    for algebra in ["skew", "rel"] {
        let lhs = if algebra == "skew" { "e1_skew_a1.json" } else { "e1_rel_ab.json" };
        let out = with_data(&["mul", "--algebra", algebra, "e1.json", lhs, "zero.json"]);
        assert_eq!(json(&out), serde_json::json!([]));
    }
}

#[test]
fn gamma_round_trip_is_byte_exact() {
    let out = with_data(&["gamma", "--dir", "fwd", "e1.json", "e1_skew_a1.json"]);
    assert_eq!(json(&out), serde_json::json!([{ "x": "a", "y": "b", "value": "1" }]));
    let out = with_data(&["gamma", "--dir", "inv", "e2.json", "e2_rel_13.json"]);
    assert_eq!(json(&out), serde_json::json!([{ "t": "-2", "coeffs": { "1": "1" } }]));

    let dir = tempfile::tempdir().unwrap();
    let skew = dir.path().join("u.json");
    let canonical = with_data(&["mul", "--algebra", "skew", "e1.json", "e1_skew_a1.json", "e1_skew_b1.json"]).stdout;
    std::fs::write(&skew, &canonical).unwrap();
    let fwd = with_data(&["gamma", "--dir", "fwd", "e1.json", skew.to_str().unwrap()]).stdout;
    let rel = dir.path().join("f.json");
    std::fs::write(&rel, &fwd).unwrap();
    let back = with_data(&["gamma", "--dir", "inv", "e1.json", rel.to_str().unwrap()]).stdout;
    assert_eq!(back, canonical);
}

#[test]
fn error_codes() {
    assert_eq!(with_data(&["validate", "missing.json"]).status.code(), Some(3));
    assert_eq!(skewrel(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(with_data(&["gamma", "--dir", "fwd", "e1_fixing_c.json", "zero.json"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"field": {"kind": "rationals"}, "group": {"kind": "integers"}, "set": [], "maps": [], "extra": 1}"#).unwrap();
    assert_eq!(skewrel(&["validate", bad.to_str().unwrap()]).status.code(), Some(3));
    let outside = dir.path().join("outside.json");
    std::fs::write(&outside, r#"[{"t": "1", "coeffs": {"c": "1"}}]"#).unwrap();
    let out = with_data(&["gamma", "--dir", "fwd", "e1.json", outside.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn selftest_on_a_table_group() {
    let out = with_data(&["selftest", "--action", "s3.json", "--seed", "3", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["targets"][0]["field"], "GF(7)");
}

#[test]
fn selftest_refuses_non_free_action() {
    let out = with_data(&["selftest", "--action", "e1_fixing_c.json", "--seed", "1", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(1));
}
