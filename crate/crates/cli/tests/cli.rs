use std::path::Path;
use std::process::{Command, Output};

use k3cox_core::{database, GeneratorReport, IntVector};
use serde_json::Value;

fn k3cox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3cox")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn structured(o: &Output) -> Vec<Value> {
    match serde_json::from_slice(&o.stdout).expect("structured output parses") {
        Value::Array(v) => v,
        other => panic!("expected an array, got {other}"),
    }
}

fn without_timing(mut docs: Vec<Value>) -> Vec<Value> {
    for d in &mut docs {
        d.as_object_mut().unwrap().remove("timing_us");
    }
    docs
}

fn classes(v: &Value) -> Vec<IntVector> {
    serde_json::from_value(v.clone()).unwrap()
}

const S1: &str = "name S_1
rank 3
gram
6 0 0
0 -2 0
0 0 -2
neg: (0,1,0), (0,0,1), (1,-2,0), (1,0,-2), (2,-3,-2), (2,-2,-3)
expected_beff: (0,0,1), (0,1,0), (1,-2,0), (1,-1,-1), (1,0,-2), (2,-3,-2), (2,-2,-3)
generators: (0,0,1), (0,1,0), (1,-2,0), (1,-1,-1), (1,0,-2), (2,-3,-2), (2,-2,-3)
end
";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_s1_matches() {
    let o = k3cox(&["verify", "--lattice", "S_1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verify: match"), "{out}");
    assert!(out.contains("generators (7, computed): (0,0,1), (0,1,0), (1,-2,0), (1,-1,-1), (1,0,-2), (2,-3,-2), (2,-2,-3)"));
}

#[test]
fn cones_of_s2_list_the_stored_nef_basis() {
    let o = k3cox(&["cones", "--lattice", "S_2", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let docs = structured(&o);
    let bnef = classes(&docs[0]["cones"]["bnef"]);
    let rec = database::find("S_2").unwrap();
    assert_eq!(Some(&bnef), rec.expected_bnef.as_ref());
    assert!(bnef.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn verify_reports_a_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    // Drop (1,-1,-1) from the expected Hilbert basis.
    let bad = S1.replace("expected_beff: (0,0,1), (0,1,0), (1,-2,0), (1,-1,-1),", "expected_beff: (0,0,1), (0,1,0), (1,-2,0),");
    let path = write(dir.path(), "s1.txt", &bad);
    let o = k3cox(&["verify", "--input", &path, "--format", "structured"]);
    assert_eq!(o.status.code(), Some(1));
    let docs = structured(&o);
    let m = &docs[0]["mismatches"][0];
    assert_eq!(m["field"], "beff");
    assert_eq!(classes(&m["extra"]), vec![IntVector::from([1, -1, -1])]);

    let good = write(dir.path(), "s1_good.txt", S1);
    assert_eq!(k3cox(&["verify", "--input", &good]).status.code(), Some(0));
}

#[test]
fn rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let asym = write(dir.path(), "asym.txt", "name A\nrank 3\ngram\n2 1 0\n0 -2 0\n0 0 -2\nend\n");
    assert_eq!(k3cox(&["cones", "--input", &asym]).status.code(), Some(2));
    let signature = write(dir.path(), "sig.txt", "name B\nrank 3\ngram\n2 0 0\n0 2 0\n0 0 -2\nend\n");
    assert_eq!(k3cox(&["cones", "--input", &signature]).status.code(), Some(2));
    let not_root = write(dir.path(), "root.txt", "name C\nrank 3\ngram\n6 0 0\n0 -2 0\n0 0 -2\nneg: (1,0,0)\nend\n");
    assert_eq!(k3cox(&["cones", "--input", &not_root]).status.code(), Some(2));
    assert_eq!(k3cox(&["cones", "--input", "/nonexistent/lattice.txt"]).status.code(), Some(2));
    assert_eq!(k3cox(&["cones", "--lattice", "S_99"]).status.code(), Some(2));
    assert_eq!(k3cox(&["cones", "--lattice", "S_1", "--jobs", "0"]).status.code(), Some(2));
    assert_eq!(k3cox(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn timeout_exits_with_three() {
    let o = k3cox(&["all", "--lattice", "S_6", "--timeout", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("timed out"));
}

/// `S_1` in the basis `e₁, e₁ + e₂, e₃`, with no curves listed.
#[test]
fn custom_lattice_is_computed_from_scratch() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "custom.json", r#"{"name": "custom", "gram": [[6, 6, 0], [6, 4, 0], [0, 0, -2]]}"#);
    let o = k3cox(&["generators", "--input", &path, "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = &structured(&o)[0];
    assert_eq!(doc["curves_provenance"], "computed");
    assert_eq!(doc["generators"]["provenance"], "computed");
    assert!(doc.get("mismatches").is_none());

    // The chamber may differ from the bundled one, so compare up to isometry: the multiset of
    // sorted rows of the Gram matrix of the degrees.
    let profile = |gram: Vec<Vec<i64>>, degrees: &[IntVector]| {
        let l = k3cox_core::Lattice::hyperbolic(k3cox_core::IntMatrix::from_rows(&gram).unwrap()).unwrap();
        let mut rows: Vec<Vec<i64>> = degrees
            .iter()
            .map(|a| {
                let mut r: Vec<i64> = degrees.iter().map(|b| l.pairing(a, b).unwrap()).collect();
                r.sort();
                r
            })
            .collect();
        rows.sort();
        rows
    };
    let rec = database::find("S_1").unwrap();
    let bundled: Vec<IntVector> = rec.expected_generators.as_ref().unwrap().iter().map(|d| d.class.clone()).collect();
    let custom = classes(&doc["generators"]["degrees"]);
    assert_eq!(profile(vec![vec![6, 6, 0], vec![6, 4, 0], vec![0, 0, -2]], &custom), profile(rec.gram.clone(), &bundled));
}

#[test]
fn witnesses_only_on_request() {
    let plain = structured(&k3cox(&["generators", "--lattice", "S_{4,1,1}", "--format", "structured"]));
    let full = structured(&k3cox(&["generators", "--lattice", "S_{4,1,1}", "--format", "structured", "--emit-witnesses"]));
    let count = |d: &Value, status: &str| {
        d["generators"]["verdicts"].as_array().unwrap().iter().filter(|v| v["status"] == status).count()
    };
    assert_eq!(count(&plain[0], "eliminated"), 0);
    assert!(count(&full[0], "eliminated") > 0);
    assert_eq!(count(&plain[0], "kept"), count(&full[0], "kept"));
    let text = stdout(&k3cox(&["generators", "--lattice", "S_{4,1,1}", "--emit-witnesses"]));
    assert!(text.contains("(0,2,2) [sum2] eliminated by test4: 2 x (0,1,1)"), "{text}");
}

#[test]
fn no_l1_flags_cubes() {
    let o = k3cox(&["generators", "--lattice", "S'_{4,1,2}", "--no-l1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("l1-unresolved: (3,6,3)"));
    let o = k3cox(&["generators", "--lattice", "S'_{4,1,2}"]);
    assert!(!stdout(&o).contains("l1-unresolved"));
}

/// Verification of the whole database is deterministic across thread counts and round-trips.
#[test]
fn full_verify_is_deterministic() {
    let one = k3cox(&["verify", "--jobs", "1", "--format", "structured"]);
    let four = k3cox(&["verify", "--jobs", "4", "--format", "structured"]);
    assert_eq!(one.status.code(), Some(0), "{}", stdout(&one));
    assert_eq!(four.status.code(), Some(0));
    let docs = without_timing(structured(&one));
    assert_eq!(docs.len(), 26);
    assert_eq!(docs, without_timing(structured(&four)));
    for d in &docs {
        assert_eq!(d["mismatches"], Value::Array(vec![]), "{}", d["lattice"]);
        let stored = d["stored_answer"].as_bool().unwrap();
        assert_eq!(d["generators"]["provenance"] == "stored", stored);
    }

    for d in structured(&one) {
        let report: GeneratorReport = serde_json::from_value(d.clone()).unwrap();
        let mut again = serde_json::to_value(&report).unwrap();
        let obj = again.as_object_mut().unwrap();
        obj.insert("mismatches".into(), d["mismatches"].clone());
        obj.insert("stored_answer".into(), d["stored_answer"].clone());
        assert_eq!(again, d);
    }
}
