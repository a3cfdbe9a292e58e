use std::path::PathBuf;
use std::process::Command;

use valstrat::verdict::{Status, Verdict};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_valstrat")).args(args).output().expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

#[test]
fn delta_of_a_tilted_line() {
    let (out, _, code) = run(&["delta", "span[(1,0)]", "span[(1,t)]"]);
    assert_eq!((out.as_str(), code), ("delta: 1\n", 0));
    let (out, _, _) = run(&["delta", "span[(1,0)]", "span[(1,0)]"]);
    assert_eq!(out, "delta: +inf\n");
}

#[test]
fn delta_rejects_unequal_dimensions() {
    let (_, err, code) = run(&["delta", "span[(1,0)]", "span[(1,0),(0,1)]"]);
    assert_eq!(code, 1);
    assert!(err.contains("dimension mismatch"), "{err}");
}

#[test]
fn demo_cone_reports_the_vm2_failure() {
    let (out, _, code) = run(&["demo", "cone"]);
    assert_eq!(code, 0);
    assert!(out.contains("vm2: FAILS lhs=0 required=1"));
    assert!(out.contains("lambdas: (1, 0)"));
}

#[test]
fn unknown_catalog_is_an_error() {
    let (_, err, code) = run(&["demo", "torus"]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown catalog entry"));
}

#[test]
fn expect_remaps_the_exit_code() {
    let f = data("cone_chain.json");
    assert_eq!(run(&["check-vm", &f, "--expect", "fails"]).2, 0);
    assert_eq!(run(&["check-vm", &f, "--expect", "holds"]).2, 3);
    let p = data("parabola_points.json");
    assert_eq!(run(&["--expect", "holds", "check-vm", &p]).2, 0);
}

#[test]
fn json_output_is_a_verdict_list() {
    let (out, _, code) = run(&["--format", "json", "check-vm", &data("cone_chain.json")]);
    assert_eq!(code, 0);
    let vs: Vec<Verdict> = serde_json::from_str(&out).unwrap();
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0].to_string(), "vm2: FAILS lhs=0 required=1");
}

#[test]
fn demo_json_labels_carry_the_chain_name() {
    let (out, _, _) = run(&["--format", "json", "demo", "cone"]);
    let vs: Vec<Verdict> = serde_json::from_str(&out).unwrap();
    assert!(vs.iter().any(|v| v.label == "augmented/vm2" && v.status == Status::Fails));
}

#[test]
fn classification_of_chain_files() {
    let (out, _, _) = run(&["check-valchain", &data("cone_chain.json")]);
    assert!(out.contains("kind: augmented") && out.contains("valchain: HOLDS"));
    let (out, _, code) = run(&["check-valchain", &data("not_a_chain.json"), "--expect", "fails"]);
    assert_eq!(code, 0, "{out}");
    let (out, _, _) = run(&["check-vm", &data("not_a_chain.json")]);
    assert!(out.contains("vm1: VACUOUS"), "{out}");
}

#[test]
fn classical_condition_fails_at_the_cone() {
    let (out, _, code) = run(&["check-classical", &data("cone_chain.json"), "--constants", "1/2, 1/2, 1, 2, 1"]);
    assert_eq!(code, 0);
    assert!(out.contains("m2: FAILS"), "{out}");
    let (_, err, code) = run(&["check-classical", &data("cone_chain.json"), "--constants", "1, 2"]);
    assert_eq!(code, 1);
    assert!(err.contains("expected 5 constants"));
}

#[test]
fn flags_from_a_chain_file() {
    let (out, _, _) = run(&["check-flags", &data("cone_chain.json")]);
    assert!(out.contains("dist(0,1): FAILS lhs=0 required=1"));
    assert!(out.contains("flags1: VACUOUS"));
}

#[test]
fn flags_from_a_family_file() {
    let (out, _, code) = run(&["check-flags", &data("family.json"), "--expect", "holds"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("flags1: HOLDS"));
}

#[test]
fn sedation_file() {
    let (out, _, code) = run(&["check-sedated", &data("square_sedation.json"), "--expect", "holds"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("version: a\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("sedated-a(")).count(), 6);
}

#[test]
fn malformed_json_reports_its_position() {
    let (_, err, code) = run(&["check-vm", &data("bad.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn selftest_prints_ok() {
    let (out, _, code) = run(&["selftest"]);
    assert_eq!((out.as_str(), code), ("OK\n", 0));
}
