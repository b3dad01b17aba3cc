//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::gen;
use foid::cli::check_document;
use foid::kernel::{check_script, indscheme_instance, induction_steps, matimps, LintKind, Reason};
use foid::parser::{document_to_string, parse, parse_formula, without_spans};
use foid::semantics::{eval_kleene, Relation, Semantics, Structure, ThreeValued, Truth};
use foid::stable::{stable_models, wf_via_oscillation};
use foid::syntax::{name, Definition, Formula, Sequent};
use foid::validator::{validate, Config, Outcome};
use foid::wf::{greatest_unfounded_set, refine, true_candidates, well_founded_model, Direction};
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn config_for(file: &str) -> Config {
    // The satisfaction example uses a binary function symbol.
    Config { wide_functions: file == "sat.foid", ..Config::default() }
}

fn corpus_proofs() -> Check {
    let mut n = 0;
    let mut slowest = Duration::ZERO;
    for file in common::PROOF_FILES {
        let doc = common::load(file);
        for b in &doc.proofs {
            let t = Instant::now();
            check_script(&doc.sequents[&b.target], &b.root).map_err(|e| format!("{file}: {}: {e}", b.target))?;
            let dt = t.elapsed();
            ensure(dt < Duration::from_secs(1), format!("{file}: {} took {dt:?}", b.target))?;
            slowest = slowest.max(dt);
            n += 1;
        }
    }
    Ok(format!("{n} proofs in {} files, slowest {slowest:.2?}", common::PROOF_FILES.len()))
}

fn naive_induction() -> Check {
    let doc = common::load("naive_defl.foid");
    let b = &doc.proofs[0];
    match check_script(&doc.sequents[&b.target], &b.root) {
        Ok(_) => Err("accepted".into()),
        Err(e) if e.reason == Reason::MinorPremiseMismatch && e.premise == Some(0) => {
            Ok(format!("rejected: {} at premise 0 of {}", e.reason, e.tag))
        }
        Err(e) => Err(format!("rejected for the wrong reason: {e}")),
    }
}

fn mutation_suite() -> Check {
    let mutants = common::mutants();
    ensure(mutants.len() >= 50, format!("only {} mutants", mutants.len()))?;
    for m in &mutants {
        let doc = common::load(m.file);
        let seq = &doc.sequents[&doc.proofs[m.proof].target];
        if check_script(seq, &m.root).is_ok() {
            return Err(format!("{} proof {} at {:?} ({:?}) accepted", m.file, m.proof, m.path, m.kind));
        }
    }
    Ok(format!("{} mutants, all rejected", mutants.len()))
}

fn soundness() -> Check {
    let t = Instant::now();
    let mut runs = 0;
    let mut partial = Vec::new();
    for file in common::PROOF_FILES {
        let doc = common::load(file);
        let targets: BTreeSet<_> = doc.proofs.iter().map(|b| b.target.clone()).collect();
        for target in targets {
            for sem in [Semantics::Wf, Semantics::Stable] {
                let v = validate(&doc.sequents[&target], sem, &config_for(file)).map_err(|e| format!("{file}: {e}"))?;
                runs += 1;
                match v.outcome {
                    Outcome::Counterexample(s) => return Err(format!("{file}: {target} ({sem}): counterexample {s:?}")),
                    Outcome::Aborted { size, .. } => partial.push((file, size)),
                    Outcome::NoCounterexample => {}
                }
            }
        }
    }
    let dt = t.elapsed();
    ensure(dt < Duration::from_secs(60), format!("took {dt:?}"))?;
    Ok(format!("{runs} validations, no counterexample, {dt:.1?}{}", beyond_cap(&partial, runs)))
}

fn wf_model(file: &str, def: &str, ctx: &str) -> (Arc<Definition>, Structure, ThreeValued) {
    let doc = common::load(file);
    let d = doc.definitions[def].clone();
    let c = doc.structures[ctx].clone();
    let m = well_founded_model(&d, &c).unwrap().0;
    (d, c, m)
}

fn choice_and_liar() -> Check {
    let (d, c, m) = wf_model("choice.foid", "Choice", "Empty");
    let stable = stable_models(&d, &c, 20).map_err(|e| e.to_string())?;
    ensure(stable.len() == 2, format!("choice: {} stable models", stable.len()))?;
    ensure(m.value("P", &[]) == Some(Truth::U) && m.value("Q", &[]) == Some(Truth::U), "choice: wf not P = Q = u")?;
    let (d, c, m) = wf_model("liar.foid", "Phi", "Empty");
    let stable = stable_models(&d, &c, 20).map_err(|e| e.to_string())?;
    ensure(stable.is_empty(), format!("liar: {} stable models", stable.len()))?;
    ensure(m.value("P", &[]) == Some(Truth::U), "liar: wf P not u")?;
    Ok("choice: 2 stable models, wf P = Q = u; liar: 0 stable models, wf P = u".into())
}

fn even_collapsed() -> Check {
    let (_, _, m) = wf_model("even.foid", "Phi", "Oprime");
    let (e0, e1) = (m.value("Even", &[0]), m.value("Even", &[1]));
    ensure(e0 == Some(Truth::T) && e1 == Some(Truth::U), format!("Even(0) = {e0:?}, Even(1) = {e1:?}"))?;
    ensure(!m.is_two_valued(), "total")?;
    Ok("Even(0) = t, Even(1) = u, non-total".into())
}

fn random_schedule(d: &Definition, ctx: &Structure, rng: &mut ChaCha8Rng) -> ThreeValued {
    let mut a = well_founded_model(d, ctx).unwrap().1.initial;
    loop {
        let trues = true_candidates(d, &a).unwrap();
        let gus = greatest_unfounded_set(d, &a).unwrap();
        if trues.is_empty() && gus.is_empty() {
            return a;
        }
        a = if !trues.is_empty() && (gus.is_empty() || rng.gen_bool(0.5)) {
            let k = rng.gen_range(1..=trues.len());
            let pick: Vec<_> = trues.choose_multiple(rng, k).cloned().collect();
            refine(d, &a, Direction::True, &pick).unwrap()
        } else {
            refine(d, &a, Direction::Unfounded, &gus).unwrap()
        };
    }
}

fn wf_oracles() -> Check {
    let defs = gen::sample(gen::definition(), 200, 11);
    let contexts = gen::contexts(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut partial = 0;
    for (i, d) in defs.iter().enumerate() {
        for c in &contexts {
            let wf = well_founded_model(d, c).map_err(|e| e.to_string())?.0;
            ensure(wf_via_oscillation(d, c).map_err(|e| e.to_string())? == wf, format!("definition {i}: oscillation differs"))?;
            ensure(random_schedule(d, c, &mut rng) == wf, format!("definition {i}: schedule differs"))?;
            partial += usize::from(!wf.is_two_valued());
        }
    }
    let runs = defs.len() * contexts.len();
    Ok(format!("{} definitions x {} contexts agree ({partial} of {runs} non-total)", defs.len(), contexts.len()))
}

fn kleene_excluded_middle() -> Check {
    let doc = parse("pred P/0.").unwrap();
    let f = parse_formula(&doc, "P | ~P").unwrap();
    let mut lower = Structure::new(1);
    lower.relations.insert(name("P"), Relation::empty(0, 1));
    let mut upper = lower.clone();
    upper.relations.insert(name("P"), Relation::full(0, 1));
    let v = eval_kleene(&ThreeValued { lower, upper }, &f).map_err(|e| e.to_string())?;
    ensure(v == Truth::U, format!("P | ~P = {v}"))?;
    Ok("P | ~P = u".into())
}

/// Summary of runs whose largest sizes exceeded the atom cap.
fn beyond_cap(partial: &[(&str, usize)], runs: usize) -> String {
    if partial.is_empty() {
        return String::new();
    }
    let files: BTreeSet<_> = partial.iter().map(|(f, _)| f.trim_end_matches(".foid")).collect();
    let from = partial.iter().map(|(_, n)| *n).min().unwrap();
    let files: Vec<_> = files.into_iter().collect();
    format!("; {} of {runs} stopped at size {from} by the atom cap ({})", partial.len(), files.join(", "))
}

fn fo_approximation() -> Check {
    let mut runs = 0;
    let mut partial = Vec::new();
    for file in common::PROOF_FILES {
        let doc = common::load(file);
        let mut goals: Vec<(Arc<Definition>, Formula)> = Vec::new();
        for d in doc.definitions.values() {
            goals.extend(matimps(d).into_iter().map(|m| (d.clone(), m)));
        }
        for r in check_document(&doc) {
            let Ok(p) = r.result else { continue };
            for (d, pred, hyps) in induction_steps(&p) {
                let f = indscheme_instance(&d, &pred, &hyps).map_err(|e| e.to_string())?;
                goals.push((d, f));
            }
        }
        for (d, f) in goals {
            let seq = Sequent::new([Formula::Def(d)], [f]);
            for sem in [Semantics::Wf, Semantics::Stable] {
                let v = validate(&seq, sem, &config_for(file)).map_err(|e| format!("{file}: {e}"))?;
                runs += 1;
                match v.outcome {
                    Outcome::Counterexample(s) => return Err(format!("{file} ({sem}): counterexample {s:?}")),
                    Outcome::Aborted { size, .. } => partial.push((file, size)),
                    Outcome::NoCounterexample => {}
                }
            }
        }
    }
    Ok(format!("{runs} validations, no counterexample{}", beyond_cap(&partial, runs)))
}

fn round_trip() -> Check {
    let mut files = 0;
    for entry in std::fs::read_dir(common::corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "foid") {
            let doc = parse(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
            let again = parse(&document_to_string(&doc)).map_err(|e| format!("{}: {e}", path.display()))?;
            ensure(without_spans(again) == without_spans(doc), format!("{} differs", path.display()))?;
            files += 1;
        }
    }
    let sig = parse(gen::SIGNATURE).unwrap();
    let formulas = gen::sample(gen::formula(), 1000, 3);
    for f in &formulas {
        let back = parse_formula(&sig, &f.to_string()).map_err(|e| format!("{f}: {e}"))?;
        ensure(&back == f, format!("{f} differs"))?;
    }
    Ok(format!("{files} corpus files and {} formulas", formulas.len()))
}

fn normalization() -> Check {
    let defs = gen::sample(gen::definition(), 100, 13);
    let contexts = gen::contexts(2);
    for (i, d) in defs.iter().enumerate() {
        let n = d.normalize();
        for c in &contexts {
            let same_wf = well_founded_model(d, c).unwrap().0 == well_founded_model(&n, c).unwrap().0;
            ensure(same_wf, format!("definition {i}: wf models differ"))?;
            ensure(stable_models(d, c, 20).unwrap() == stable_models(&n, c, 20).unwrap(), format!("definition {i}: stable models differ"))?;
        }
    }
    let doc = common::load("cut_o_or_not_o.foid");
    ensure(doc.definitions["Phi"].normalize() == *doc.definitions["Norm"], "Norm is not the normal form of Phi")?;
    for r in check_document(&doc) {
        r.result.map_err(|e| format!("{}: {e}", r.target))?;
    }
    Ok(format!("{} definitions x {} contexts; Goal and NormGoal both proved", defs.len(), contexts.len()))
}

fn lints() -> Check {
    let kinds = |file: &str| -> Vec<Vec<LintKind>> {
        check_document(&common::load(file)).into_iter().map(|r| r.warnings.iter().map(|w| w.kind).collect()).collect()
    };
    ensure(kinds("two_definitions.foid")[0].contains(&LintKind::NonElementaryCut), "two definitions: cut not flagged")?;
    ensure(kinds("cut_or_not_p.foid")[1].is_empty(), "rewrite of the P <- O | ~P proof is flagged")?;
    ensure(kinds("cut_o_or_not_o.foid")[1].is_empty(), "rewrite of the P <- O, P <- ~O proof is flagged")?;
    for file in common::PROOF_FILES {
        ensure(kinds(file).iter().flatten().all(|k| *k != LintKind::PiOutsideMd), format!("{file}: MD lint fired"))?;
    }
    Ok("cut flagged, rewrites clean, MD lint silent".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("corpus proofs check", corpus_proofs),
        ("naive induction rejected", naive_induction),
        ("mutation suite", mutation_suite),
        ("soundness up to size 3", soundness),
        ("choice and liar models", choice_and_liar),
        ("even in a collapsed context", even_collapsed),
        ("wf oracles and confluence", wf_oracles),
        ("kleene excluded middle", kleene_excluded_middle),
        ("first-order approximation", fo_approximation),
        ("parser round trip", round_trip),
        ("normalization", normalization),
        ("lints", lints),
    ];
    // Optional arguments select criteria by number.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        match result {
            Ok(detail) => println!("PASS {:>2} {label}: {detail} [{dt:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {label}: {why} [{dt:.1?}]", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
