mod common;

use std::time::{Duration, Instant};

use foid::cli::check_document;
use foid::kernel::{check_script, lint, LintKind, Reason};

#[test]
fn corpus_proofs_check_quickly() {
    for file in common::PROOF_FILES {
        let doc = common::load(file);
        assert!(!doc.proofs.is_empty(), "{file}");
        for r in check_document(&doc) {
            let block = doc.proofs.iter().find(|b| b.target == r.target).unwrap();
            let t = Instant::now();
            check_script(&doc.sequents[&block.target], &block.root).unwrap();
            assert!(t.elapsed() < Duration::from_secs(1), "{file}: {}", r.target);
            assert!(r.result.is_ok(), "{file}: {:?}", r.result);
        }
    }
}

#[test]
fn checking_is_deterministic() {
    for file in common::PROOF_FILES.iter().chain(&["naive_defl.foid"]) {
        let doc = common::load(file);
        for b in &doc.proofs {
            let seq = &doc.sequents[&b.target];
            assert_eq!(check_script(seq, &b.root), check_script(seq, &b.root), "{file}");
        }
    }
    for m in common::mutants().iter().step_by(17) {
        let doc = common::load(m.file);
        let seq = &doc.sequents[&doc.proofs[m.proof].target];
        assert_eq!(check_script(seq, &m.root), check_script(seq, &m.root));
    }
}

#[test]
fn naive_induction_fails_at_the_minor_premise() {
    let doc = common::load("naive_defl.foid");
    let b = &doc.proofs[0];
    let e = check_script(&doc.sequents[&b.target], &b.root).unwrap_err();
    assert_eq!(e.reason, Reason::MinorPremiseMismatch);
    assert_eq!(e.premise, Some(0));
    assert!(e.path.is_empty());
}

#[test]
fn normal_form_pair_is_in_the_corpus() {
    let doc = common::load("cut_o_or_not_o.foid");
    let (phi, norm) = (&doc.definitions["Phi"], &doc.definitions["Norm"]);
    assert_eq!(phi.normalize(), **norm);
    let results = check_document(&doc);
    for target in ["Goal", "NormGoal"] {
        assert!(results.iter().any(|r| &*r.target == target && r.result.is_ok()), "{target}");
    }
}

#[test]
fn lints_on_the_cut_examples() {
    let warnings = |file: &str| -> Vec<Vec<LintKind>> {
        let doc = common::load(file);
        check_document(&doc).into_iter().map(|r| r.warnings.iter().map(|w| w.kind).collect()).collect()
    };
    assert_eq!(warnings("two_definitions.foid"), vec![vec![LintKind::NonElementaryCut]]);
    assert!(warnings("cut_or_not_p.foid")[1].is_empty());
    let w = warnings("cut_o_or_not_o.foid");
    assert_eq!(w[0], vec![LintKind::NonElementaryCut]);
    assert!(w[1].is_empty() && w[2].is_empty());
    for file in common::PROOF_FILES {
        let doc = common::load(file);
        for r in check_document(&doc) {
            let p = r.result.unwrap();
            assert!(lint(&p).iter().all(|w| w.kind != LintKind::PiOutsideMd), "{file}");
        }
    }
}
