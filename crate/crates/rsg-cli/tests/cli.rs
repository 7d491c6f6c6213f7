use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn rsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsg")).args(args).env_remove("RSG_OUT_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classes_of_three_loops() {
    let o = rsg(&["graph", "classes", "--input", data("loops3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Z/2");
}

#[test]
fn z2_atoms_demo() {
    let o = rsg(&["demo", "z2-atoms", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "24 infinite atoms; 4 with 3 children");
}

#[test]
fn ternary_axioms_pass() {
    let o = rsg(&["trans", "verify-nucleus", "--input", data("ternary.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for ax in ["MapNuc", "IdNuc", "LocNuc", "RecurNuc", "InvNuc", "ProdNuc"] {
        assert!(out.contains(&format!("{ax} PASS")), "{out}");
    }
}

#[test]
fn literal_binary_pair_is_negative() {
    let dir = std::env::temp_dir().join("rsg-cli-pair");
    let text = std::fs::read_to_string(data("binary.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["nucleus"]["members"] = serde_json::json!(["1", "f"]);
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pair.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = rsg(&["trans", "verify-nucleus", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("LocNuc FAIL"));
}

#[test]
fn exit_codes() {
    let parity = rsg(&["v", "map-cones", "--input", data("parity.json").to_str().unwrap()]);
    assert_eq!(parity.status.code(), Some(1));
    assert!(stdout(&parity).starts_with("class obstruction"));
    let shift = rsg(&["v", "map-cones", "--input", data("shift.json").to_str().unwrap()]);
    assert_eq!(shift.status.code(), Some(0));
    assert_eq!(rsg(&["graph", "classes"]).status.code(), Some(2));
    assert_eq!(rsg(&["demo", "nonexistent"]).status.code(), Some(2));
    assert_eq!(rsg(&["graph", "frobnicate"]).status.code(), Some(2));
    assert_eq!(rsg(&["demo", "houghton"]).status.code(), Some(0));
    let z2 = rsg(&["hyp", "certify", "--oracle", r#"{"kind":"zn","n":2}"#]);
    assert_eq!(z2.status.code(), Some(1));
    assert_eq!(rsg(&["atoms", "build", "--oracle", r#"{"kind":"free","rank":2}"#, "--horizon", "0"]).status.code(), Some(2));
}

#[test]
fn json_is_versioned_and_deterministic() {
    let t = data("ternary.json");
    let args = ["rsg", "ker-del1", "--input", t.to_str().unwrap(), "--json", "--seed", "7"];
    let a = rsg(&args);
    let b = rsg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["result"]["generators"].as_array().unwrap().len(), 2);
}

#[test]
fn artifacts_are_written() {
    let dir = std::env::temp_dir().join("rsg-cli-out");
    let _ = std::fs::remove_dir_all(&dir);
    let o = rsg(&["atoms", "build", "--oracle", r#"{"kind":"zn","n":2}"#, "--level", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["atoms-build.json", "atoms.csv", "atoms.dot"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("atoms-build.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["result"]["levels"][2]["infinite"], 16);
}

#[test]
fn transducer_and_rsg_commands() {
    let t = data("ternary.json");
    let t = t.to_str().unwrap();
    let o = rsg(&["trans", "eval", "--input", t]);
    assert!(stdout(&o).contains("1 -> 02 [1]"));
    let o = rsg(&["trans", "invert", "--input", t]);
    assert!(stdout(&o).contains("image {0, 1}"));
    let o = rsg(&["trans", "nucleus", "--input", data("binary.json").to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "nucleus {1, f, k}");
    let o = rsg(&["rsg", "germ", "--input", t]);
    assert_eq!(stdout(&o).trim(), "λ = 1");
    let m = data("binary-member.json");
    let o = rsg(&["rsg", "member", "--input", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = rsg(&["rsg", "normalish", "--input", m.to_str().unwrap()]);
    assert!(stdout(&o).contains("recognized: true"));
}

#[test]
fn free_group_certificate() {
    let o = rsg(&["hyp", "certify", "--oracle", r#"{"kind":"free","rank":2}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("full contracting RSG certificate"));
    let o = rsg(&["hyp", "triple", "--oracle", r#"{"kind":"free","rank":2}"#, "--g", "a", "--w", "ab"]);
    assert_eq!(o.status.code(), Some(2));
}
