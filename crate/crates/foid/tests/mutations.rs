mod common;

use foid::kernel::check_script;

#[test]
fn every_mutant_is_rejected() {
    let mutants = common::mutants();
    let mut survivors = Vec::new();
    for m in &mutants {
        let doc = common::load(m.file);
        let target = &doc.proofs[m.proof].target;
        let seq = &doc.sequents[target];
        if check_script(seq, &m.root).is_ok() {
            survivors.push(format!("{} proof {} at {:?} ({:?})", m.file, m.proof, m.path, m.kind));
        }
    }
    eprintln!("{} mutants", mutants.len());
    assert!(mutants.len() >= 50);
    assert!(survivors.is_empty(), "accepted mutants:\n{}", survivors.join("\n"));
}

#[test]
fn mutants_cover_every_kind() {
    use common::Kind::*;
    let mutants = common::mutants();
    for k in [FlippedPolarity, AlteredWitness, RemovedPremise, DroppedCondition] {
        let n = mutants.iter().filter(|m| m.kind == k).count();
        eprintln!("{k:?}: {n}");
        assert!(n >= 5, "{k:?}: {n}");
    }
}
