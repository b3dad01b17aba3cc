#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;
use std::sync::Arc;

use foid::kernel::{ScriptArgs, ScriptNode, Tag};
use foid::parser::{parse_named, Document};
use foid::syntax::{name, Formula, Hyp, Term};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load(file: &str) -> Document {
    let path = corpus_dir().join(file);
    let text = std::fs::read_to_string(&path).unwrap();
    parse_named(&text, file).unwrap()
}

/// Corpus files whose proofs are expected to check.
pub const PROOF_FILES: [&str; 10] = [
    "even.foid",
    "sat.foid",
    "distance.foid",
    "temporal.foid",
    "reachability.foid",
    "liar.foid",
    "access.foid",
    "cut_or_not_p.foid",
    "cut_o_or_not_o.foid",
    "two_definitions.foid",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    FlippedPolarity,
    AlteredWitness,
    RemovedPremise,
    DroppedCondition,
}

#[derive(Clone, Debug)]
pub struct Mutant {
    pub file: &'static str,
    pub proof: usize,
    pub path: Vec<usize>,
    pub kind: Kind,
    pub root: ScriptNode,
}

fn flip(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => (**g).clone(),
        f => Formula::Not(Box::new(f.clone())),
    }
}

/// Terms different from `t`, drawn from the constants of the file plus
/// one unused variable.
fn alternatives(doc: &Document, t: &Term) -> Vec<Term> {
    doc.signature
        .consts
        .iter()
        .map(|c| Term::Obj(c.clone()))
        .chain([Term::Obj(name("fresh_w"))])
        .filter(|u| u != t)
        .take(2)
        .collect()
}

fn local(doc: &Document, node: &ScriptNode) -> Vec<(Kind, ScriptNode)> {
    let mut out = Vec::new();
    let with = |args: ScriptArgs| ScriptNode { args, ..node.clone() };
    match &node.args {
        ScriptArgs::Formula(f) => out.push((Kind::FlippedPolarity, with(ScriptArgs::Formula(flip(f))))),
        ScriptArgs::FormulaTerm(f, t) => {
            out.push((Kind::FlippedPolarity, with(ScriptArgs::FormulaTerm(flip(f), t.clone()))));
            for u in alternatives(doc, t) {
                out.push((Kind::AlteredWitness, with(ScriptArgs::FormulaTerm(f.clone(), u))));
            }
        }
        ScriptArgs::Subst(t, x, s) => {
            for u in alternatives(doc, t) {
                out.push((Kind::AlteredWitness, with(ScriptArgs::Subst(u, x.clone(), s.clone()))));
            }
        }
        ScriptArgs::EqL { t, s, x, y, templates } if t != s => out.push((
            Kind::FlippedPolarity,
            with(ScriptArgs::EqL { t: s.clone(), s: t.clone(), x: x.clone(), y: y.clone(), templates: templates.clone() }),
        )),
        ScriptArgs::DefR { def, rule, witnesses } => {
            let n = def.rules().len();
            if n > 1 {
                let rule = (rule + 1) % n;
                out.push((Kind::DroppedCondition, with(ScriptArgs::DefR { def: def.clone(), rule, witnesses: witnesses.clone() })));
            }
            for (i, w) in witnesses.iter().enumerate() {
                if let Some(u) = alternatives(doc, w).into_iter().next() {
                    let mut ws = witnesses.clone();
                    ws[i] = u;
                    out.push((Kind::AlteredWitness, with(ScriptArgs::DefR { def: def.clone(), rule: *rule, witnesses: ws })));
                }
            }
        }
        ScriptArgs::DefL { def, pred, args, hyps } => {
            for (q, h) in hyps {
                let mut hs = hyps.clone();
                hs.insert(q.clone(), Hyp { vars: h.vars.clone(), formula: flip(&h.formula) });
                out.push((
                    Kind::FlippedPolarity,
                    with(ScriptArgs::DefL { def: Arc::clone(def), pred: pred.clone(), args: args.clone(), hyps: hs }),
                ));
            }
            for (i, a) in args.iter().enumerate() {
                if let Some(u) = alternatives(doc, a).into_iter().next() {
                    let mut az = args.clone();
                    az[i] = u;
                    out.push((
                        Kind::AlteredWitness,
                        with(ScriptArgs::DefL { def: Arc::clone(def), pred: pred.clone(), args: az, hyps: hyps.clone() }),
                    ));
                }
            }
        }
        _ => {}
    }
    if node.children.len() > 1 && node.tag != Tag::Wk {
        for i in 0..node.children.len() {
            let mut m = node.clone();
            m.children.remove(i);
            out.push((Kind::RemovedPremise, m));
        }
    }
    out
}

fn walk(doc: &Document, node: &ScriptNode, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Kind, ScriptNode)>) {
    for (k, m) in local(doc, node) {
        out.push((path.clone(), k, m));
    }
    for (i, c) in node.children.iter().enumerate() {
        path.push(i);
        walk(doc, c, path, out);
        path.pop();
    }
}

fn replace(root: &ScriptNode, path: &[usize], with: ScriptNode) -> ScriptNode {
    match path.split_first() {
        None => with,
        Some((&i, rest)) => {
            let mut r = root.clone();
            r.children[i] = replace(&root.children[i], rest, with);
            r
        }
    }
}

/// Every single-edit mutant of every proof in the proof corpus.
pub fn mutants() -> Vec<Mutant> {
    let mut out = Vec::new();
    for file in PROOF_FILES {
        let doc = load(file);
        for (pi, block) in doc.proofs.iter().enumerate() {
            let mut sites = Vec::new();
            walk(&doc, &block.root, &mut Vec::new(), &mut sites);
            for (path, kind, node) in sites {
                let root = replace(&block.root, &path, node);
                out.push(Mutant { file, proof: pi, path, kind, root });
            }
        }
    }
    out
}
