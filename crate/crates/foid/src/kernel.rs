//! The proof checker. Proofs are trees of sequents labelled with rule
//! applications whose parameters are given explicitly; the checker only
//! recomputes premises and compares.
//!
//! Scripts (`ScriptNode`) are the surface form: a node names a rule and its
//! parameters, and child sequents are filled in top-down by [`elaborate`].
//! A node may pin its sequent with `@ Γ |- Δ`, which is how a wrong
//! derivation is written down and then rejected.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

use crate::parser::{formula_to_string, sequent_to_string, term_to_string, Names, SourceSpan};
use crate::syntax::{fresh_or_same, Definition, Formula, Hyps, LogicError, Name, Sequent, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Ax,
    Wk,
    Subst,
    Cut,
    NotL,
    NotR,
    OrL,
    OrR,
    AndL,
    AndR,
    ImpL,
    ImpR,
    IffL,
    IffR,
    AllL,
    AllR,
    ExL,
    ExR,
    EqL,
    EqR,
    DefR,
    DefL,
    DefL2,
}

impl Tag {
    pub const ALL: [Tag; 23] = [
        Tag::Ax,
        Tag::Wk,
        Tag::Subst,
        Tag::Cut,
        Tag::NotL,
        Tag::NotR,
        Tag::OrL,
        Tag::OrR,
        Tag::AndL,
        Tag::AndR,
        Tag::ImpL,
        Tag::ImpR,
        Tag::IffL,
        Tag::IffR,
        Tag::AllL,
        Tag::AllR,
        Tag::ExL,
        Tag::ExR,
        Tag::EqL,
        Tag::EqR,
        Tag::DefR,
        Tag::DefL,
        Tag::DefL2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Ax => "ax",
            Tag::Wk => "wk",
            Tag::Subst => "subst",
            Tag::Cut => "cut",
            Tag::NotL => "notL",
            Tag::NotR => "notR",
            Tag::OrL => "orL",
            Tag::OrR => "orR",
            Tag::AndL => "andL",
            Tag::AndR => "andR",
            Tag::ImpL => "impL",
            Tag::ImpR => "impR",
            Tag::IffL => "iffL",
            Tag::IffR => "iffR",
            Tag::AllL => "allL",
            Tag::AllR => "allR",
            Tag::ExL => "exL",
            Tag::ExR => "exR",
            Tag::EqL => "eqL",
            Tag::EqR => "eqR",
            Tag::DefR => "defR",
            Tag::DefL => "defL",
            Tag::DefL2 => "defL2",
        }
    }

    pub fn from_name(s: &str) -> Option<Tag> {
        if s == "defL2macro" {
            return Some(Tag::DefL2);
        }
        Tag::ALL.into_iter().find(|t| t.name() == s)
    }

    fn is_left(self) -> bool {
        matches!(self, Tag::NotL | Tag::AndL | Tag::OrL | Tag::ImpL | Tag::IffL | Tag::AllL | Tag::ExL)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// ---------------------------------------------------------------- scripts

/// Arguments of a script node, in surface form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptArgs {
    None,
    Formula(Formula),
    FormulaTerm(Formula, Term),
    /// `wk(Γ′ |- Δ′)`: the premise itself.
    Premise(Sequent),
    /// `wk(drop Γ |- Δ)`: formulas removed from the conclusion.
    Drop(Sequent),
    Subst(Term, Name, Sequent),
    /// Conclusion formulas not produced by a template are carried over as is.
    EqL {
        t: Term,
        s: Term,
        x: Name,
        y: Name,
        templates: Sequent,
    },
    DefR {
        def: Arc<Definition>,
        rule: usize,
        witnesses: Vec<Term>,
    },
    DefL {
        def: Arc<Definition>,
        pred: Name,
        args: Vec<Term>,
        hyps: Hyps,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptNode {
    pub tag: Tag,
    pub args: ScriptArgs,
    /// Pinned conclusion, if written.
    pub sequent: Option<Sequent>,
    pub children: Vec<ScriptNode>,
    pub span: Option<SourceSpan>,
}

impl ScriptNode {
    pub fn new(tag: Tag, args: ScriptArgs, children: Vec<ScriptNode>) -> ScriptNode {
        ScriptNode {
            tag,
            args,
            sequent: None,
            children,
            span: None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ScriptNode::size).sum::<usize>()
    }
}

// ---------------------------------------------------------------- proofs

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Params {
    None,
    Subst { t: Term, x: Name },
    Cut(Formula),
    Principal(Formula),
    Instance { principal: Formula, t: Term },
    EqL {
        x: Name,
        y: Name,
        t: Term,
        s: Term,
        gamma0: Vec<Formula>,
        delta0: Vec<Formula>,
    },
    DefR {
        def: Arc<Definition>,
        rule: usize,
        witnesses: Vec<Term>,
    },
    DefL {
        def: Arc<Definition>,
        pred: Name,
        args: Vec<Term>,
        hyps: Hyps,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApp {
    pub tag: Tag,
    pub params: Params,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub sequent: Sequent,
    pub rule: RuleApp,
    pub span: Option<SourceSpan>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub nodes: Vec<ProofNode>,
    pub root: usize,
}

impl Proof {
    pub fn root_sequent(&self) -> &Sequent {
        &self.nodes[self.root].sequent
    }

    pub fn count(&self, tag: Tag) -> usize {
        self.nodes.iter().filter(|n| n.rule.tag == tag).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    Malformed,
    RootMismatch,
    WrongParams,
    PremiseCount,
    PremiseMismatch,
    MinorPremiseMismatch,
    MajorPremiseMismatch,
    NotAnAxiom,
    PrincipalAbsent,
    PrincipalShape,
    Eigenvariable,
    NotWeakening,
    SubstMismatch,
    SubstCapture,
    EqTemplate,
    DefinitionAbsent,
    RuleIndex,
    WitnessCount,
    HeadAbsent,
    AtomAbsent,
    Hypotheses,
    BothPolarity,
    RuleVariableFree,
    HypothesisCapture,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::Malformed => "malformed",
            Reason::RootMismatch => "root-mismatch",
            Reason::WrongParams => "wrong-params",
            Reason::PremiseCount => "premise-count",
            Reason::PremiseMismatch => "premise-mismatch",
            Reason::MinorPremiseMismatch => "minor-premise-mismatch",
            Reason::MajorPremiseMismatch => "major-premise-mismatch",
            Reason::NotAnAxiom => "not-an-axiom",
            Reason::PrincipalAbsent => "principal-absent",
            Reason::PrincipalShape => "principal-shape",
            Reason::Eigenvariable => "eigenvariable",
            Reason::NotWeakening => "not-weakening",
            Reason::SubstMismatch => "subst-mismatch",
            Reason::SubstCapture => "subst-capture",
            Reason::EqTemplate => "eq-template",
            Reason::DefinitionAbsent => "definition-absent",
            Reason::RuleIndex => "rule-index",
            Reason::WitnessCount => "witness-count",
            Reason::HeadAbsent => "head-absent",
            Reason::AtomAbsent => "atom-absent",
            Reason::Hypotheses => "hypotheses",
            Reason::BothPolarity => "both-polarity",
            Reason::RuleVariableFree => "rule-variable-free",
            Reason::HypothesisCapture => "hypothesis-capture",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("node {node} ({tag}) at path {}: {reason}: {message}", fmt_path(path))]
pub struct CheckError {
    pub node: usize,
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub tag: Tag,
    pub reason: Reason,
    pub message: String,
    pub formulas: Vec<Formula>,
    /// Index of the offending premise, when one is to blame.
    pub premise: Option<usize>,
    pub span: Option<SourceSpan>,
}

fn fmt_path(p: &[usize]) -> String {
    if p.is_empty() {
        return "root".into();
    }
    p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

/// A rule failure before it is placed in the tree.
#[derive(Debug)]
struct Fail {
    reason: Reason,
    message: String,
    formulas: Vec<Formula>,
    premise: Option<usize>,
}

fn fail<T>(reason: Reason, message: impl Into<String>, formulas: Vec<Formula>) -> Result<T, Fail> {
    Err(Fail {
        reason,
        message: message.into(),
        formulas,
        premise: None,
    })
}

impl From<LogicError> for Fail {
    fn from(e: LogicError) -> Fail {
        let reason = match e {
            LogicError::BothPolarity(_) => Reason::BothPolarity,
            _ => Reason::Hypotheses,
        };
        Fail {
            reason,
            message: e.to_string(),
            formulas: Vec::new(),
            premise: None,
        }
    }
}

// ---------------------------------------------------------------- rules

type Side = IndexSet<Formula>;

fn without(s: &Side, f: &Formula) -> Side {
    let mut out = s.clone();
    out.shift_remove(f);
    out
}

fn plus(s: &Side, fs: &[&Formula]) -> Side {
    let mut out = s.clone();
    out.extend(fs.iter().map(|f| (*f).clone()));
    out
}

fn sq(left: Side, right: Side) -> Sequent {
    Sequent { left, right }
}

fn show(f: &Formula) -> String {
    formula_to_string(f, Names::default())
}

fn instance(body: &Formula, x: &Name, t: &Term) -> Formula {
    body.substitute(t, x)
}

/// Premise lists accepted for a connective or quantifier rule. The first
/// removes the principal formula, the second keeps it.
fn logical(c: &Sequent, tag: Tag, p: &Formula, t: Option<&Term>) -> Result<Vec<Vec<Sequent>>, Fail> {
    let left = tag.is_left();
    let side = if left { &c.left } else { &c.right };
    if !side.contains(p) {
        let where_ = if left { "left" } else { "right" };
        return fail(Reason::PrincipalAbsent, format!("{} is not on the {where_}", show(p)), vec![p.clone()]);
    }
    let shape_ok = matches!(
        (tag, p),
        (Tag::NotL | Tag::NotR, Formula::Not(_))
            | (Tag::AndL | Tag::AndR, Formula::And(..))
            | (Tag::OrL | Tag::OrR, Formula::Or(..))
            | (Tag::ImpL | Tag::ImpR, Formula::Implies(..))
            | (Tag::IffL | Tag::IffR, Formula::Iff(..))
            | (Tag::AllL | Tag::AllR, Formula::Forall(..))
            | (Tag::ExL | Tag::ExR, Formula::Exists(..))
    );
    if !shape_ok {
        return fail(Reason::PrincipalShape, format!("{} does not fit {tag}", show(p)), vec![p.clone()]);
    }
    if matches!(tag, Tag::AllR | Tag::ExL) {
        let (Formula::Forall(x, _) | Formula::Exists(x, _)) = p else { unreachable!() };
        if c.free_objects().contains(x) {
            return fail(Reason::Eigenvariable, format!("{x} occurs free in the conclusion"), vec![p.clone()]);
        }
    }
    let build = |l: &Side, r: &Side| -> Vec<Sequent> {
        match (tag, p) {
            (Tag::NotL, Formula::Not(a)) => vec![sq(l.clone(), plus(r, &[a]))],
            (Tag::NotR, Formula::Not(a)) => vec![sq(plus(l, &[a]), r.clone())],
            (Tag::AndL, Formula::And(a, b)) => vec![sq(plus(l, &[a, b]), r.clone())],
            (Tag::AndR, Formula::And(a, b)) => vec![sq(l.clone(), plus(r, &[a])), sq(l.clone(), plus(r, &[b]))],
            (Tag::OrL, Formula::Or(a, b)) => vec![sq(plus(l, &[a]), r.clone()), sq(plus(l, &[b]), r.clone())],
            (Tag::OrR, Formula::Or(a, b)) => vec![sq(l.clone(), plus(r, &[a, b]))],
            (Tag::ImpL, Formula::Implies(a, b)) => vec![sq(l.clone(), plus(r, &[a])), sq(plus(l, &[b]), r.clone())],
            (Tag::ImpR, Formula::Implies(a, b)) => vec![sq(plus(l, &[a]), plus(r, &[b]))],
            (Tag::IffL, Formula::Iff(a, b)) => vec![sq(l.clone(), plus(r, &[a, b])), sq(plus(l, &[a, b]), r.clone())],
            (Tag::IffR, Formula::Iff(a, b)) => {
                vec![sq(plus(l, &[a]), plus(r, &[b])), sq(plus(l, &[b]), plus(r, &[a]))]
            }
            (Tag::AllL, Formula::Forall(x, a)) => vec![sq(plus(l, &[&instance(a, x, t.unwrap())]), r.clone())],
            (Tag::ExR, Formula::Exists(x, a)) => vec![sq(l.clone(), plus(r, &[&instance(a, x, t.unwrap())]))],
            (Tag::AllR, Formula::Forall(_, a)) => vec![sq(l.clone(), plus(r, &[a]))],
            (Tag::ExL, Formula::Exists(_, a)) => vec![sq(plus(l, &[a]), r.clone())],
            _ => unreachable!(),
        }
    };
    let dropped = if left {
        build(&without(&c.left, p), &c.right)
    } else {
        build(&c.left, &without(&c.right, p))
    };
    let kept = build(&c.left, &c.right);
    Ok(if dropped == kept { vec![dropped] } else { vec![dropped, kept] })
}

fn find_def<'a>(c: &Sequent, def: &'a Arc<Definition>) -> Result<&'a Arc<Definition>, Fail> {
    let f = Formula::Def(def.clone());
    if c.left.contains(&f) {
        Ok(def)
    } else {
        fail(Reason::DefinitionAbsent, "definition is not on the left", vec![f])
    }
}

fn hyp_instance(hyps: &Hyps, q: &Name, args: &[Term]) -> Formula {
    let h = &hyps[q];
    let sigma: Vec<(Name, Term)> = h.vars.iter().cloned().zip(args.iter().cloned()).collect();
    h.formula.subst(&sigma)
}

/// Parameters of the hypotheses, i.e. their free symbols other than `z̄`.
fn hyp_params(hyps: &Hyps) -> BTreeSet<Name> {
    hyps.values()
        .flat_map(|h| h.formula.free_objects().into_iter().filter(|o| !h.vars.contains(o)))
        .collect()
}

/// Shared checks of the induction rule; returns minor and major premises
/// for the conclusion `left ⊢ right`.
fn def_l_premises(
    left: &Side,
    right: &Side,
    def: &Definition,
    pred: &Name,
    args: &[Term],
    hyps: &Hyps,
) -> Result<(Vec<Sequent>, Sequent), Fail> {
    let atom = Formula::Atom(pred.clone(), args.to_vec());
    if !left.contains(&atom) {
        return fail(Reason::AtomAbsent, format!("{} is not on the left", show(&atom)), vec![atom]);
    }
    if !def.defines(pred) || def.arity(pred) != Some(args.len()) {
        return fail(Reason::Hypotheses, format!("{pred} is not defined with this arity"), vec![atom]);
    }
    if !hyps.contains_key(pred) {
        return fail(Reason::Hypotheses, format!("no induction hypothesis for {pred}"), vec![atom]);
    }
    def.check_hyps(hyps)?;
    let base = without(left, &atom);
    let ctx_free: BTreeSet<Name> = base.iter().chain(right.iter()).flat_map(|f| f.free_objects()).collect();
    for (i, r) in def.rules().iter().enumerate() {
        if let Some(y) = r.bound.iter().find(|y| ctx_free.contains(*y)) {
            return fail(Reason::RuleVariableFree, format!("variable {y} of rule {i} occurs free in the context"), vec![]);
        }
    }
    let params = hyp_params(hyps);
    let mut minors = Vec::new();
    for (i, r) in def.rules().iter().enumerate().filter(|(_, r)| hyps.contains_key(&r.head)) {
        if let Some(y) = r.bound.iter().find(|y| params.contains(*y)) {
            return fail(
                Reason::HypothesisCapture,
                format!("variable {y} of rule {i} occurs free in an induction hypothesis"),
                vec![],
            );
        }
        let body = r.body.replace_positive(hyps)?;
        let goal = hyp_instance(hyps, &r.head, &r.args);
        minors.push(sq(plus(&base, &[&body]), plus(right, &[&goal])));
    }
    let major = sq(plus(&base, &[&hyp_instance(hyps, pred, args)]), right.clone());
    Ok((minors, major))
}

/// The accepted premise lists of a node, for every rule except `wk` and
/// `subst`, whose premise is not determined by the conclusion.
fn alternatives(c: &Sequent, tag: Tag, params: &Params) -> Result<Vec<Vec<Sequent>>, Fail> {
    match (tag, params) {
        (Tag::Ax, Params::None) => {
            let ok = c.left.iter().any(|f| c.right.contains(f)) || c.left.contains(&Formula::False) || c.right.contains(&Formula::True);
            if ok {
                Ok(vec![vec![]])
            } else {
                fail(Reason::NotAnAxiom, "no formula on both sides, no false on the left, no true on the right", vec![])
            }
        }
        (Tag::EqR, Params::None) => {
            if c.right.iter().any(|f| matches!(f, Formula::Eq(a, b) if a == b)) {
                Ok(vec![vec![]])
            } else {
                fail(Reason::NotAnAxiom, "no t = t on the right", vec![])
            }
        }
        (Tag::Cut, Params::Cut(f)) => Ok(vec![vec![sq(c.left.clone(), plus(&c.right, &[f])), sq(plus(&c.left, &[f]), c.right.clone())]]),
        (
            Tag::NotL | Tag::NotR | Tag::AndL | Tag::AndR | Tag::OrL | Tag::OrR | Tag::ImpL | Tag::ImpR | Tag::IffL | Tag::IffR | Tag::AllR | Tag::ExL,
            Params::Principal(p),
        ) => logical(c, tag, p, None),
        (Tag::AllL | Tag::ExR, Params::Instance { principal, t }) => logical(c, tag, principal, Some(t)),
        (Tag::EqL, Params::EqL { x, y, t, s, gamma0, delta0 }) => {
            if x == y {
                return fail(Reason::EqTemplate, "template variables must differ", vec![]);
            }
            let inst = |fs: &[Formula], a: &Term, b: &Term| -> Side {
                let sigma = [(x.clone(), a.clone()), (y.clone(), b.clone())];
                fs.iter().map(|f| f.subst(&sigma)).collect()
            };
            let eq = Formula::Eq(t.clone(), s.clone());
            let expect = sq(plus(&inst(gamma0, t, s), &[&eq]), inst(delta0, t, s));
            if expect != *c {
                let mut diff: Vec<Formula> = c.left.symmetric_difference(&expect.left).cloned().collect();
                diff.extend(c.right.symmetric_difference(&expect.right).cloned());
                return fail(Reason::EqTemplate, "conclusion is not the template instance", diff);
            }
            Ok(vec![vec![sq(inst(gamma0, s, t), inst(delta0, s, t))]])
        }
        (Tag::DefR, Params::DefR { def, rule, witnesses }) => {
            let def = find_def(c, def)?;
            let Some(r) = def.rules().get(*rule) else {
                return fail(Reason::RuleIndex, format!("definition has no rule {rule}"), vec![]);
            };
            if witnesses.len() != r.bound.len() {
                return fail(Reason::WitnessCount, format!("rule {rule} binds {} variables", r.bound.len()), vec![]);
            }
            let (head, body) = r.instantiate(witnesses);
            if !c.right.contains(&head) {
                return fail(Reason::HeadAbsent, format!("{} is not on the right", show(&head)), vec![head]);
            }
            let kept = sq(c.left.clone(), plus(&c.right, &[&body]));
            let dropped = sq(c.left.clone(), plus(&without(&c.right, &head), &[&body]));
            Ok(if kept == dropped { vec![vec![kept]] } else { vec![vec![kept], vec![dropped]] })
        }
        (Tag::DefL, Params::DefL { def, pred, args, hyps }) => {
            let def = find_def(c, def)?;
            let (mut minors, major) = def_l_premises(&c.left, &c.right, def, pred, args, hyps)?;
            minors.push(major);
            Ok(vec![minors])
        }
        (Tag::DefL2, Params::DefL { def, pred, args, hyps }) => {
            let def = find_def(c, def)?;
            if !hyps.contains_key(pred) {
                return fail(Reason::Hypotheses, format!("no induction hypothesis for {pred}"), vec![]);
            }
            let goal = hyp_instance(hyps, pred, args);
            if !c.right.contains(&goal) {
                return fail(Reason::HeadAbsent, format!("{} is not on the right", show(&goal)), vec![goal]);
            }
            // side conditions as for the expanded rule, whose context keeps the goal
            def_l_premises(&c.left, &c.right, def, pred, args, hyps)?;
            let (short, _) = def_l_premises(&c.left, &without(&c.right, &goal), def, pred, args, hyps)?;
            let (full, _) = def_l_premises(&c.left, &c.right, def, pred, args, hyps)?;
            Ok(if short == full { vec![short] } else { vec![short, full] })
        }
        _ => fail(Reason::WrongParams, format!("parameters do not fit {tag}"), vec![]),
    }
}

fn premise_reason(tag: Tag, i: usize, count: usize) -> Reason {
    match tag {
        Tag::DefL if i + 1 == count => Reason::MajorPremiseMismatch,
        Tag::DefL | Tag::DefL2 => Reason::MinorPremiseMismatch,
        _ => Reason::PremiseMismatch,
    }
}

/// Check one node against the sequents of its children.
fn check_node(c: &Sequent, rule: &RuleApp, kids: &[&Sequent]) -> Result<(), Fail> {
    match (rule.tag, &rule.params) {
        (Tag::Wk, Params::None) => {
            let [k] = kids else {
                return fail(Reason::PremiseCount, "wk has one premise", vec![]);
            };
            let extra: Vec<Formula> = k
                .left
                .iter()
                .filter(|f| !c.left.contains(*f))
                .chain(k.right.iter().filter(|f| !c.right.contains(*f)))
                .cloned()
                .collect();
            if extra.is_empty() {
                Ok(())
            } else {
                fail(Reason::NotWeakening, "premise has formulas the conclusion lacks", extra)
            }
        }
        (Tag::Subst, Params::Subst { t, x }) => {
            let [k] = kids else {
                return fail(Reason::PremiseCount, "subst has one premise", vec![]);
            };
            let mut bound = BTreeSet::new();
            k.formulas().for_each(|f| f.bound_objects(&mut bound));
            let mut objs = BTreeSet::new();
            t.objects(&mut objs);
            if let Some(b) = objs.intersection(&bound).next() {
                return fail(Reason::SubstCapture, format!("{b} is quantified in the premise"), vec![]);
            }
            if k.subst(&[(x.clone(), t.clone())]) == *c {
                Ok(())
            } else {
                fail(Reason::SubstMismatch, "conclusion is not the premise under the substitution", vec![])
            }
        }
        (Tag::Wk | Tag::Subst, _) => fail(Reason::WrongParams, format!("parameters do not fit {}", rule.tag), vec![]),
        (tag, params) => {
            let alts = alternatives(c, tag, params)?;
            let n = alts[0].len();
            if kids.len() != n {
                return fail(Reason::PremiseCount, format!("{tag} here has {n} premises, got {}", kids.len()), vec![]);
            }
            if alts.iter().any(|alt| alt.iter().zip(kids).all(|(a, k)| a == *k)) {
                return Ok(());
            }
            // blame the first premise that fits no alternative
            let i = (0..n).find(|&i| alts.iter().all(|alt| alt[i] != *kids[i])).unwrap_or(0);
            let want = &alts[0][i];
            let mut diff: Vec<Formula> = kids[i].left.symmetric_difference(&want.left).cloned().collect();
            diff.extend(kids[i].right.symmetric_difference(&want.right).cloned());
            Err(Fail {
                reason: premise_reason(tag, i, n),
                message: format!("premise {i} should be {}", sequent_to_string(want, Names::default())),
                formulas: diff,
                premise: Some(i),
            })
        }
    }
}

/// Check a proof against the sequent it is meant to prove.
pub fn check(p: &Proof, expected: &Sequent) -> Result<(), CheckError> {
    let order = walk(p)?;
    let root = &p.nodes[p.root];
    if root.sequent != *expected {
        return Err(CheckError {
            node: p.root,
            path: vec![],
            tag: root.rule.tag,
            reason: Reason::RootMismatch,
            message: format!("proves {} instead", sequent_to_string(&root.sequent, Names::default())),
            formulas: vec![],
            premise: None,
            span: root.span.clone(),
        });
    }
    for (i, path) in order {
        let n = &p.nodes[i];
        let kids: Vec<&Sequent> = n.rule.children.iter().map(|&k| &p.nodes[k].sequent).collect();
        check_node(&n.sequent, &n.rule, &kids).map_err(|f| CheckError {
            node: i,
            path,
            tag: n.rule.tag,
            reason: f.reason,
            message: f.message,
            formulas: f.formulas,
            premise: f.premise,
            span: n.span.clone(),
        })?;
    }
    Ok(())
}

/// Nodes in preorder with their paths; rejects sharing, cycles, dangling
/// children and unreachable nodes.
fn walk(p: &Proof) -> Result<Vec<(usize, Vec<usize>)>, CheckError> {
    let malformed = |node: usize, path: Vec<usize>, msg: &str| CheckError {
        node,
        path,
        tag: p.nodes.get(node).map_or(Tag::Ax, |n| n.rule.tag),
        reason: Reason::Malformed,
        message: msg.into(),
        formulas: vec![],
        premise: None,
        span: None,
    };
    if p.root >= p.nodes.len() {
        return Err(malformed(p.root, vec![], "root index out of range"));
    }
    let mut seen = vec![false; p.nodes.len()];
    let mut out = Vec::new();
    let mut stack = vec![(p.root, Vec::new())];
    while let Some((i, path)) = stack.pop() {
        if seen[i] {
            return Err(malformed(i, path, "node reached twice"));
        }
        seen[i] = true;
        for (k, &c) in p.nodes[i].rule.children.iter().enumerate().rev() {
            if c >= p.nodes.len() {
                return Err(malformed(i, path.clone(), "child index out of range"));
            }
            let mut cp = path.clone();
            cp.push(k);
            stack.push((c, cp));
        }
        out.push((i, path));
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(malformed(i, vec![], "node not reachable from the root"));
    }
    Ok(out)
}

// ---------------------------------------------------------------- elaboration

struct Elab {
    nodes: Vec<ProofNode>,
}

fn placeholder() -> ProofNode {
    ProofNode {
        sequent: Sequent::default(),
        rule: RuleApp {
            tag: Tag::Ax,
            params: Params::None,
            children: vec![],
        },
        span: None,
    }
}

fn script_params(c: &Sequent, node: &ScriptNode) -> Result<Params, Fail> {
    use Tag::*;
    Ok(match (node.tag, &node.args) {
        (Ax | EqR | Wk, _) => Params::None,
        (Subst, ScriptArgs::Subst(t, x, _)) => Params::Subst { t: t.clone(), x: x.clone() },
        (Cut, ScriptArgs::Formula(f)) => Params::Cut(f.clone()),
        (NotL | NotR | AndL | AndR | OrL | OrR | ImpL | ImpR | IffL | IffR | AllR | ExL, ScriptArgs::Formula(f)) => {
            Params::Principal(f.clone())
        }
        (AllL | ExR, ScriptArgs::FormulaTerm(f, t)) => Params::Instance {
            principal: f.clone(),
            t: t.clone(),
        },
        (EqL, ScriptArgs::EqL { t, s, x, y, templates }) => {
            let sigma = [(x.clone(), t.clone()), (y.clone(), s.clone())];
            let eq = Formula::Eq(t.clone(), s.clone());
            let carry = |side: &Side, tmpl: &Side, skip: Option<&Formula>| -> Vec<Formula> {
                let made: HashSet<Formula> = tmpl.iter().map(|f| f.subst(&sigma)).collect();
                let mut out: Vec<Formula> = tmpl.iter().cloned().collect();
                out.extend(side.iter().filter(|f| !made.contains(*f) && Some(*f) != skip).cloned());
                out
            };
            Params::EqL {
                x: x.clone(),
                y: y.clone(),
                t: t.clone(),
                s: s.clone(),
                gamma0: carry(&c.left, &templates.left, Some(&eq)),
                delta0: carry(&c.right, &templates.right, None),
            }
        }
        (DefR, ScriptArgs::DefR { def, rule, witnesses }) => Params::DefR {
            def: def.clone(),
            rule: *rule,
            witnesses: witnesses.clone(),
        },
        (DefL | DefL2, ScriptArgs::DefL { def, pred, args, hyps }) => Params::DefL {
            def: def.clone(),
            pred: pred.clone(),
            args: args.clone(),
            hyps: hyps.clone(),
        },
        (tag, _) => return fail(Reason::WrongParams, format!("arguments do not fit {tag}"), vec![]),
    })
}

impl Elab {
    fn node(&mut self, given: Sequent, s: &ScriptNode, path: &mut Vec<usize>) -> Result<usize, CheckError> {
        let seq = s.sequent.clone().unwrap_or(given);
        let idx = self.nodes.len();
        self.nodes.push(placeholder());
        let err = |f: Fail, path: &Vec<usize>| CheckError {
            node: idx,
            path: path.clone(),
            tag: s.tag,
            reason: f.reason,
            message: f.message,
            formulas: f.formulas,
            premise: f.premise,
            span: s.span.clone(),
        };
        let params = script_params(&seq, s).map_err(|f| err(f, path))?;
        let premises: Vec<Sequent> = match (s.tag, &s.args) {
            (Tag::Wk, ScriptArgs::Premise(p)) => vec![p.clone()],
            (Tag::Wk, ScriptArgs::Drop(d)) => {
                let missing: Vec<Formula> = d
                    .left
                    .iter()
                    .filter(|f| !seq.left.contains(*f))
                    .chain(d.right.iter().filter(|f| !seq.right.contains(*f)))
                    .cloned()
                    .collect();
                if !missing.is_empty() {
                    return Err(err(
                        Fail {
                            reason: Reason::NotWeakening,
                            message: "dropped formulas are not in the conclusion".into(),
                            formulas: missing,
                            premise: None,
                        },
                        path,
                    ));
                }
                vec![sq(
                    seq.left.iter().filter(|f| !d.left.contains(*f)).cloned().collect(),
                    seq.right.iter().filter(|f| !d.right.contains(*f)).cloned().collect(),
                )]
            }
            (Tag::Wk, _) => return Err(err(Fail { reason: Reason::WrongParams, message: "wk needs a premise".into(), formulas: vec![], premise: None }, path)),
            (Tag::Subst, ScriptArgs::Subst(_, _, p)) => vec![p.clone()],
            (tag, _) => alternatives(&seq, tag, &params).map_err(|f| err(f, path))?.swap_remove(0),
        };
        if premises.len() != s.children.len() {
            let f = Fail {
                reason: Reason::PremiseCount,
                message: format!("{} here has {} premises, script gives {}", s.tag, premises.len(), s.children.len()),
                formulas: vec![],
                premise: None,
            };
            return Err(err(f, path));
        }
        let mut children = Vec::new();
        for (k, (p, c)) in premises.into_iter().zip(&s.children).enumerate() {
            path.push(k);
            children.push(self.node(p, c, path)?);
            path.pop();
        }
        self.nodes[idx] = ProofNode {
            sequent: seq,
            rule: RuleApp {
                tag: s.tag,
                params,
                children,
            },
            span: s.span.clone(),
        };
        Ok(idx)
    }
}

/// Build the proof tree a script describes for `root`.
pub fn elaborate(root: &Sequent, script: &ScriptNode) -> Result<Proof, CheckError> {
    let mut e = Elab { nodes: Vec::new() };
    let r = e.node(root.clone(), script, &mut Vec::new())?;
    Ok(Proof { nodes: e.nodes, root: r })
}

/// Elaborate and check.
pub fn check_script(root: &Sequent, script: &ScriptNode) -> Result<Proof, CheckError> {
    let p = elaborate(root, script)?;
    check(&p, root)?;
    Ok(p)
}

// ---------------------------------------------------------------- defL2

/// Replace the `defL2` node `at` by the primitive fragment: weakened minor
/// premises, an axiom for the major premise and `defL`.
pub fn expand_def_l2(p: &Proof, at: usize) -> Result<Proof, CheckError> {
    let node = &p.nodes[at];
    let err = |f: Fail| CheckError {
        node: at,
        path: vec![],
        tag: Tag::DefL2,
        reason: f.reason,
        message: f.message,
        formulas: f.formulas,
        premise: f.premise,
        span: node.span.clone(),
    };
    let (Tag::DefL2, Params::DefL { def, pred, args, hyps }) = (node.rule.tag, &node.rule.params) else {
        return Err(err(Fail {
            reason: Reason::WrongParams,
            message: "not a defL2 node".into(),
            formulas: vec![],
            premise: None,
        }));
    };
    let c = &node.sequent;
    let (minors, major) = def_l_premises(&c.left, &c.right, def, pred, args, hyps).map_err(err)?;
    if minors.len() != node.rule.children.len() {
        return Err(err(Fail {
            reason: Reason::PremiseCount,
            message: "wrong number of minor premises".into(),
            formulas: vec![],
            premise: None,
        }));
    }
    let mut out = p.clone();
    let mut kids = Vec::new();
    for (m, &child) in minors.into_iter().zip(&node.rule.children) {
        kids.push(out.nodes.len());
        out.nodes.push(ProofNode {
            sequent: m,
            rule: RuleApp {
                tag: Tag::Wk,
                params: Params::None,
                children: vec![child],
            },
            span: None,
        });
    }
    kids.push(out.nodes.len());
    out.nodes.push(ProofNode {
        sequent: major,
        rule: RuleApp {
            tag: Tag::Ax,
            params: Params::None,
            children: vec![],
        },
        span: None,
    });
    out.nodes[at].rule.tag = Tag::DefL;
    out.nodes[at].rule.children = kids;
    Ok(out)
}

/// Expand every `defL2` node.
pub fn expand_macros(p: &Proof) -> Result<Proof, CheckError> {
    let mut out = p.clone();
    for i in 0..p.nodes.len() {
        if p.nodes[i].rule.tag == Tag::DefL2 {
            out = expand_def_l2(&out, i)?;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- FO approximation

/// `∀x̄: φ ⇒ P(t̄)` for every rule.
pub fn matimps(d: &Definition) -> Vec<Formula> {
    d.rules()
        .iter()
        .map(|r| Formula::forall_all(&r.bound, Formula::implies(r.body.clone(), r.head_atom())))
        .collect()
}

/// The induction-scheme instance for `pred` with hypotheses for `Π`:
/// `⋀ (∀ȳ: ψ[F_Π/Π⁺] ⇒ F_Q[s̄]) ⇒ ∀x̄: P(x̄) ⇒ F_P[x̄]`.
pub fn indscheme_instance(d: &Definition, pred: &Name, hyps: &Hyps) -> Result<Formula, LogicError> {
    let k = d.arity(pred).ok_or_else(|| LogicError::NotDefined(pred.clone()))?;
    if !hyps.contains_key(pred) {
        return Err(LogicError::InvalidHypothesis(pred.clone(), "no hypothesis for the predicate".into()));
    }
    d.check_hyps(hyps)?;
    let params = hyp_params(hyps);
    let mut premises = Vec::new();
    for r in d.rules().iter().filter(|r| hyps.contains_key(&r.head)) {
        if let Some(y) = r.bound.iter().find(|y| params.contains(*y)) {
            return Err(LogicError::InvalidHypothesis(r.head.clone(), format!("rule variable {y} is free in a hypothesis")));
        }
        let body = r.body.replace_positive(hyps)?;
        let goal = hyp_instance(hyps, &r.head, &r.args);
        premises.push(Formula::forall_all(&r.bound, Formula::implies(body, goal)));
    }
    let mut used = HashSet::new();
    d.names(&mut used);
    for (q, h) in hyps {
        used.insert(q.clone());
        used.extend(h.vars.iter().cloned());
        h.formula.names(&mut used);
    }
    let xs: Vec<Name> = (0..k).map(|_| fresh_or_same("x", &mut used)).collect();
    let xt: Vec<Term> = xs.iter().cloned().map(Term::Obj).collect();
    let conclusion = Formula::forall_all(
        &xs,
        Formula::implies(Formula::Atom(pred.clone(), xt.clone()), hyp_instance(hyps, pred, &xt)),
    );
    Ok(Formula::implies(Formula::conj(premises), conclusion))
}

/// Every `(definition, predicate, hypotheses)` used by an induction step.
pub fn induction_steps(p: &Proof) -> Vec<(Arc<Definition>, Name, Hyps)> {
    p.nodes
        .iter()
        .filter_map(|n| match (&n.rule.tag, &n.rule.params) {
            (Tag::DefL | Tag::DefL2, Params::DefL { def, pred, hyps, .. }) => Some((def.clone(), pred.clone(), hyps.clone())),
            _ => None,
        })
        .collect()
}

// ---------------------------------------------------------------- lints

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LintKind {
    /// `Π` not contained in the mutual dependents of the inducted predicate.
    PiOutsideMd,
    NonElementaryCut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub node: usize,
    pub kind: LintKind,
    pub message: String,
}

impl LintKind {
    pub fn code(self) -> &'static str {
        match self {
            LintKind::PiOutsideMd => "pi-outside-md",
            LintKind::NonElementaryCut => "non-elementary-cut",
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning[{}] node {}: {}", self.kind.code(), self.node, self.message)
    }
}

/// `∀ȳ: Q(ȳ) ∨ ¬Q(ȳ)` for some `Q` in `negs`.
pub fn is_elementary_cut(f: &Formula, negs: &BTreeSet<Name>) -> bool {
    let mut ys = Vec::new();
    let mut cur = f;
    while let Formula::Forall(y, b) = cur {
        ys.push(Term::Obj(y.clone()));
        cur = b;
    }
    let distinct: BTreeSet<&Term> = ys.iter().collect();
    match cur {
        Formula::Or(a, b) => match (&**a, &**b) {
            (Formula::Atom(q, args), Formula::Not(n)) => {
                **n == Formula::Atom(q.clone(), args.clone()) && *args == ys && distinct.len() == ys.len() && negs.contains(q)
            }
            _ => false,
        },
        _ => false,
    }
}

/// Predicates occurring negatively in some rule body of the root's definitions.
fn negative_predicates(s: &Sequent) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for d in s.definitions() {
        for r in d.rules() {
            let preds = r.body.vocab().preds;
            for q in preds.keys() {
                if matches!(r.body.polarity_of(q), Some(crate::syntax::Polarity::Negative | crate::syntax::Polarity::Both)) {
                    out.insert(q.clone());
                }
            }
        }
    }
    out
}

/// Warnings for a checked proof. The cut lint applies when the root is a
/// regular sequent.
pub fn lint(p: &Proof) -> Vec<Warning> {
    let mut out = Vec::new();
    for (i, n) in p.nodes.iter().enumerate() {
        if let (Tag::DefL | Tag::DefL2, Params::DefL { def, pred, hyps, .. }) = (n.rule.tag, &n.rule.params) {
            if let Ok(md) = def.mutual_dependents(pred) {
                let outside: Vec<&Name> = hyps.keys().filter(|q| !md.contains(*q)).collect();
                if !outside.is_empty() {
                    out.push(Warning {
                        node: i,
                        kind: LintKind::PiOutsideMd,
                        message: format!(
                            "induction on {pred} includes {} outside its mutual dependents",
                            outside.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
                        ),
                    });
                }
            }
        }
    }
    let root = p.root_sequent();
    if root.is_regular() {
        let negs = negative_predicates(root);
        for (i, n) in p.nodes.iter().enumerate() {
            if let (Tag::Cut, Params::Cut(f)) = (n.rule.tag, &n.rule.params) {
                if !is_elementary_cut(f, &negs) {
                    out.push(Warning {
                        node: i,
                        kind: LintKind::NonElementaryCut,
                        message: format!("cut on {} is not elementary", show(f)),
                    });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- dump

fn params_to_string(p: &Params) -> String {
    let f = show;
    match p {
        Params::None => String::new(),
        Params::Subst { t, x } => format!("{}; {x}", term_to_string(t)),
        Params::Cut(c) | Params::Principal(c) => f(c),
        Params::Instance { principal, t } => format!("{}; {}", f(principal), term_to_string(t)),
        Params::EqL { x, y, t, s, gamma0, delta0 } => format!(
            "{} = {}; {x}, {y}; {}",
            term_to_string(t),
            term_to_string(s),
            sequent_to_string(&Sequent::new(gamma0.clone(), delta0.clone()), Names::default())
        ),
        Params::DefR { rule, witnesses, .. } => {
            let ws: Vec<String> = witnesses.iter().map(term_to_string).collect();
            format!("rule {rule}; {}", ws.join(", "))
        }
        Params::DefL { pred, args, hyps, .. } => {
            let hs: Vec<String> = hyps
                .iter()
                .map(|(q, h)| {
                    let vs: Vec<&str> = h.vars.iter().map(|v| &**v).collect();
                    format!("{q}[{}] := {}", vs.join(", "), f(&h.formula))
                })
                .collect();
            format!("{}; {}", f(&Formula::Atom(pred.clone(), args.clone())), hs.join(", "))
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One line per node: index, tag, parameters, children and sequent.
pub fn dump(p: &Proof) -> String {
    let mut out = String::new();
    for (i, n) in p.nodes.iter().enumerate() {
        let kids: Vec<String> = n.rule.children.iter().map(|c| c.to_string()).collect();
        writeln!(
            out,
            "node={i} tag={} params={} children={} sequent={}",
            n.rule.tag,
            quote(&params_to_string(&n.rule.params)),
            if kids.is_empty() { "-".to_string() } else { kids.join(",") },
            quote(&sequent_to_string(&n.sequent, Names::default()))
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, parse_formula, Document};

    fn doc(text: &str) -> Document {
        parse(text).unwrap()
    }

    fn run(d: &Document, i: usize) -> Result<Proof, CheckError> {
        let pb = &d.proofs[i];
        check_script(&d.sequents[&pb.target], &pb.root)
    }

    const NAT: &str = "pred Nat/1, G/1. fun succ/1. const zero.
        def Phi { Nat(zero) <- true. forall n. Nat(succ(n)) <- Nat(n). }";

    #[test]
    fn propositional_rules() {
        let d = doc("pred P/0, Q/0.
            sequent S: P & Q |- Q | P.
            proof of S: andL(P & Q) { orR(Q | P) { ax } }
            sequent T: |- P => P.
            proof of T: impR(P => P) { ax }");
        run(&d, 0).unwrap();
        run(&d, 1).unwrap();
    }

    #[test]
    fn rejects_missing_principal_and_bad_axiom() {
        let d = doc("pred P/0, Q/0.
            sequent S: P |- Q.
            proof of S: ax
            sequent T: P |- Q.
            proof of T: notL(~P) { ax }");
        assert_eq!(run(&d, 0).unwrap_err().reason, Reason::NotAnAxiom);
        assert_eq!(run(&d, 1).unwrap_err().reason, Reason::PrincipalAbsent);
    }

    #[test]
    fn eigenvariable_condition() {
        let d = doc("pred P/1.
            sequent S: P(x) |- forall x. P(x).
            proof of S: allR(forall x. P(x)) { ax }");
        assert_eq!(run(&d, 0).unwrap_err().reason, Reason::Eigenvariable);
    }

    #[test]
    fn def_l2_expands() {
        let d = doc(&format!("{NAT} pred H/1.
            formula Step: forall n. H(n) => H(succ(n)).
            sequent S: Phi, H(zero), Step, Nat(x) |- H(x).
            proof of S: defL2(Phi; Nat(x); Nat[z] := H(z)) {{
              ax;
              allL(Step; n) {{ impL(H(n) => H(succ(n))) {{ ax; ax }} }}
            }}
            proof of S: defL2(Phi; Nat(x); Nat[z] := H(z)) {{
              ax;
              ax @ Phi, H(zero), Step, H(n) |- H(succ(n)), H(n)
            }}"));
        let p = run(&d, 0).unwrap();
        let e = expand_macros(&p).unwrap();
        assert_eq!(e.count(Tag::DefL2), 0);
        assert_eq!(e.count(Tag::DefL), 1);
        check(&e, &d.sequents["S"]).unwrap();
        let err = run(&d, 1).unwrap_err();
        assert_eq!(err.reason, Reason::MinorPremiseMismatch);
        assert_eq!(err.premise, Some(1));
    }

    #[test]
    fn matimps_and_scheme() {
        let d = doc(NAT);
        let phi = &d.definitions["Phi"];
        let m = matimps(phi);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], parse_formula(&d, "true => Nat(zero)").unwrap());
        assert_eq!(m[1], parse_formula(&d, "forall n. Nat(n) => Nat(succ(n))").unwrap());
        let mut hyps = Hyps::new();
        hyps.insert(
            crate::syntax::name("Nat"),
            crate::syntax::Hyp {
                vars: vec![crate::syntax::name("z")],
                formula: parse_formula(&d, "G(z)").unwrap(),
            },
        );
        let s = indscheme_instance(phi, &crate::syntax::name("Nat"), &hyps).unwrap();
        let want = parse_formula(&d, "(true => G(zero)) & (forall n. G(n) => G(succ(n))) => (forall x. Nat(x) => G(x))").unwrap();
        assert_eq!(s, want);
    }

    #[test]
    fn elementary_cut_shape() {
        let d = doc("pred Q/1, P/0.");
        let negs: BTreeSet<Name> = [crate::syntax::name("Q")].into();
        assert!(is_elementary_cut(&parse_formula(&d, "forall y. Q(y) | ~Q(y)").unwrap(), &negs));
        assert!(!is_elementary_cut(&parse_formula(&d, "forall y. Q(y) | ~Q(z)").unwrap(), &negs));
        assert!(!is_elementary_cut(&parse_formula(&d, "P | ~P").unwrap(), &negs));
    }

    #[test]
    fn check_is_deterministic_and_dump_has_a_line_per_node() {
        let d = doc("pred P/0. sequent S: P |- P | P. proof of S: orR(P | P) { ax }");
        let p = run(&d, 0).unwrap();
        assert_eq!(dump(&p).lines().count(), p.nodes.len());
        assert_eq!(check(&p, &d.sequents["S"]), check(&p, &d.sequents["S"]));
    }
}
