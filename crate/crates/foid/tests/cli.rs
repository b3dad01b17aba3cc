mod common;

use std::path::PathBuf;
use std::process::Command;

use foid::cli::{run_captured, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use foid::parser::{document_to_string, Document};

fn corpus(file: &str) -> String {
    common::corpus_dir().join(file).display().to_string()
}

fn foid(args: &[&str]) -> (i32, String, String) {
    run_captured(std::iter::once("foid").chain(args.iter().copied()))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("foid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_reports_proof_counts() {
    let (code, out, _) = foid(&["check", &corpus("even.foid")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("ok (1 proof)\n"), "{out}");
    let empty = scratch("empty.foid", "");
    let (code, out, _) = foid(&["check", empty.to_str().unwrap()]);
    assert_eq!((code, out.trim()), (EXIT_OK, "0 proofs"));
}

#[test]
fn mutated_file_fails_with_a_path() {
    let m = common::mutants().into_iter().find(|m| m.file == "even.foid" && m.path.len() > 2).unwrap();
    let mut doc: Document = common::load(m.file);
    doc.proofs[m.proof].root = m.root;
    let p = scratch("mutant.foid", &document_to_string(&doc));
    let (code, out, err) = foid(&["check", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAIL, "{out}{err}");
    assert!(err.contains("at path"), "{err}");
    assert!(out.contains("FAILED (1 of 1 proof)"), "{out}");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(foid(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(foid(&["check"]).0, EXIT_USAGE);
    assert_eq!(foid(&["validate", &corpus("even.foid"), "NotEvenOne", "--cap", "0"]).0, EXIT_USAGE);
    assert_eq!(foid(&["check", "/nonexistent/x.foid"]).0, EXIT_USAGE);
    let bad = scratch("bad.foid", "pred P/1.\nformula F: P(x");
    let (code, _, err) = foid(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bad.foid:2:"), "{err}");
    assert_eq!(foid(&["model", &corpus("even.foid"), "Nope", "Oprime"]).0, EXIT_USAGE);
    assert_eq!(foid(&["validate", &corpus("even.foid"), "Nope"]).0, EXIT_USAGE);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = foid(&["--help"]);
    assert_eq!(code, EXIT_OK);
    for cmd in ["check", "model", "stable", "validate", "export-fo", "lint"] {
        assert!(out.contains(cmd), "{cmd}");
    }
}

#[test]
fn model_outputs() {
    let (code, out, _) = foid(&["model", &corpus("even.foid"), "Phi", "Oprime"]);
    assert_eq!((code, out.trim()), (EXIT_OK, "Even: 0↦t, 1↦u; non-total"));
    let (_, out, _) = foid(&["-v", "model", &corpus("even.foid"), "Phi", "Oprime"]);
    assert!(out.contains("step 1: Even(0) := t"), "{out}");
    let (_, out, _) = foid(&["stable", &corpus("choice.foid"), "Choice", "Empty"]);
    assert_eq!(out, "2 stable models\nmodel 1: P: f; Q: t\nmodel 2: P: t; Q: f\n");
    let (_, out, _) = foid(&["model", &corpus("liar.foid"), "Phi", "Empty", "--semantics", "stable"]);
    assert_eq!(out.trim(), "0 stable models");
}

#[test]
fn validate_separates_the_semantics() {
    let (code, out, _) = foid(&["validate", &corpus("choice.foid"), "NotChoice"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("no counterexample up to size 3 (wf)"), "{out}");
    assert!(out.contains("counterexample of size 1 (stable)"), "{out}");
    let (code, _, _) = foid(&["validate", &corpus("choice.foid"), "NotChoice", "--semantics", "wf", "--max-n", "2"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn export_gives_matimps_and_scheme_instances() {
    let (code, out, err) = foid(&["export-fo", &corpus("nat.foid"), "NatG", "--hyps", &corpus("nat_g.hyp")]);
    assert_eq!(code, EXIT_OK, "{err}");
    let formulas = out.lines().filter(|l| l.starts_with("formula ")).count();
    assert_eq!(formulas, 3, "{out}");
    // The export is itself a document the tool accepts.
    let p = scratch("export.foid", &out);
    let (code, out, _) = foid(&["validate", p.to_str().unwrap(), "Export", "--max-n", "2"]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn structured_records_are_key_value_lines() {
    let (_, out, _) = foid(&["--format", "structured", "check", &corpus("two_definitions.foid")]);
    for line in out.lines() {
        let mut rest = line;
        while !rest.is_empty() {
            let (key, after) = rest.split_once('=').unwrap_or_else(|| panic!("{line}"));
            assert!(key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-'), "{line}");
            let after = if let Some(q) = after.strip_prefix('"') {
                let end = q.find('"').unwrap();
                &q[end + 1..]
            } else {
                after.find(' ').map_or("", |i| &after[i..])
            };
            rest = after.trim_start();
        }
    }
    assert!(out.contains("lint=non-elementary-cut"));
    assert!(out.lines().last().unwrap().starts_with("kind=summary"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_foid");
    let st = Command::new(bin).args(["check", &corpus("even.foid")]).env("FOID_NO_COLOR", "1").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_OK));
    assert!(!String::from_utf8_lossy(&st.stdout).contains('\x1b'));
    let st = Command::new(bin).args(["check", &corpus("naive_defl.foid")]).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_FAIL));
    let st = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_USAGE));
}
