//! Terms, formulas, definitions and sequents, plus the syntactic operations
//! the calculus and the engines are built on.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Object,
    Function,
    Predicate,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: Name,
    pub kind: SymbolKind,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Obj(Name),
    App(Name, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Name, Vec<Term>),
    Eq(Term, Term),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Name, Box<Formula>),
    Exists(Name, Box<Formula>),
    Def(Arc<Definition>),
}

/// `∀x̄: P(t̄) ← φ`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub bound: Vec<Name>,
    pub head: Name,
    pub args: Vec<Term>,
    pub body: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Definition {
    rules: Vec<Rule>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sequent {
    pub left: IndexSet<Formula>,
    pub right: IndexSet<Formula>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    Both,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
            Polarity::Both => Polarity::Both,
        }
    }

    fn join(self, other: Polarity) -> Polarity {
        if self == other {
            self
        } else {
            Polarity::Both
        }
    }
}

/// An induction hypothesis `F_Q[z̄]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyp {
    pub vars: Vec<Name>,
    pub formula: Formula,
}

pub type Hyps = IndexMap<Name, Hyp>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("predicate {0} occurs under a biconditional and cannot be replaced")]
    BothPolarity(Name),
    #[error("{0} is not defined by the definition")]
    NotDefined(Name),
    #[error("definition is not stratified")]
    NotStratified,
    #[error("tuple {0:?} is not fresh for the rules of {1}")]
    BadFreshTuple(Vec<Name>, Name),
    #[error("negated defined predicate {0} in definition #{1}")]
    NegatedDefinedPredicate(Name, usize),
    #[error("sequent is not canonical: {0}")]
    NotCanonical(String),
    #[error("invalid definition: {0}")]
    InvalidDefinition(String),
    #[error("invalid hypothesis for {0}: {1}")]
    InvalidHypothesis(Name, String),
}

/// Symbols used by a formula, with arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    pub preds: BTreeMap<Name, usize>,
    pub funcs: BTreeMap<Name, usize>,
    pub objects: BTreeSet<Name>,
}

impl Vocab {
    pub fn merge(&mut self, other: &Vocab) {
        self.preds.extend(other.preds.iter().map(|(k, v)| (k.clone(), *v)));
        self.funcs.extend(other.funcs.iter().map(|(k, v)| (k.clone(), *v)));
        self.objects.extend(other.objects.iter().cloned());
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let objs = self.objects.iter().map(|n| Symbol {
            name: n.clone(),
            kind: SymbolKind::Object,
            arity: 0,
        });
        let funcs = self.funcs.iter().map(|(n, a)| Symbol {
            name: n.clone(),
            kind: SymbolKind::Function,
            arity: *a,
        });
        let preds = self.preds.iter().map(|(n, a)| Symbol {
            name: n.clone(),
            kind: SymbolKind::Predicate,
            arity: *a,
        });
        objs.chain(funcs).chain(preds).collect()
    }
}

// ---------------------------------------------------------------- terms

impl Term {
    pub fn obj(s: &str) -> Term {
        Term::Obj(name(s))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(name(f), args)
    }

    pub fn objects(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Obj(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.objects(out)),
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Obj(y) => &**y == x,
            Term::App(_, args) => args.iter().any(|a| a.mentions(x)),
        }
    }

    fn names(&self, out: &mut HashSet<Name>) {
        match self {
            Term::Obj(x) => {
                out.insert(x.clone());
            }
            Term::App(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.names(out));
            }
        }
    }

    fn vocab(&self, v: &mut Vocab) {
        match self {
            Term::Obj(x) => {
                v.objects.insert(x.clone());
            }
            Term::App(f, args) => {
                v.funcs.insert(f.clone(), args.len());
                args.iter().for_each(|a| a.vocab(v));
            }
        }
    }

    pub fn subst(&self, sigma: &[(Name, Term)]) -> Term {
        match self {
            Term::Obj(x) => sigma
                .iter()
                .find(|(y, _)| y == x)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(sigma)).collect()),
        }
    }
}

// ---------------------------------------------------------------- formulas

impl Formula {
    pub fn atom(p: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(name(p), args)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::Forall(name(x), Box::new(f))
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::Exists(name(x), Box::new(f))
    }

    pub fn forall_all(xs: &[Name], f: Formula) -> Formula {
        xs.iter().rev().fold(f, |acc, x| Formula::Forall(x.clone(), Box::new(acc)))
    }

    pub fn exists_all(xs: &[Name], f: Formula) -> Formula {
        xs.iter().rev().fold(f, |acc, x| Formula::Exists(x.clone(), Box::new(acc)))
    }

    /// Right-nested conjunction; `⊤` for the empty list.
    pub fn conj(mut fs: Vec<Formula>) -> Formula {
        match fs.pop() {
            None => Formula::True,
            Some(last) => fs.into_iter().rev().fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// `s̄ = t̄` as a right-nested conjunction, or `None` for empty tuples.
    pub fn tuple_eq(lhs: &[Term], rhs: &[Term]) -> Option<Formula> {
        if lhs.is_empty() {
            return None;
        }
        Some(Formula::conj(
            lhs.iter().zip(rhs).map(|(a, b)| Formula::Eq(a.clone(), b.clone())).collect(),
        ))
    }

    pub fn free_objects(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let add_term = |t: &Term, bound: &Vec<Name>, out: &mut BTreeSet<Name>| {
            let mut objs = BTreeSet::new();
            t.objects(&mut objs);
            out.extend(objs.into_iter().filter(|o| !bound.contains(o)));
        };
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|a| add_term(a, bound, out)),
            Formula::Eq(a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.free_into(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                bound.push(x.clone());
                f.free_into(bound, out);
                bound.pop();
            }
            Formula::Def(d) => out.extend(d.free_objects().into_iter().filter(|o| !bound.contains(o))),
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        self.free_objects().iter().any(|y| &**y == x)
    }

    /// Every name occurring anywhere, bound or free, of any kind.
    pub fn names(&self, out: &mut HashSet<Name>) {
        match self {
            Formula::Atom(p, args) => {
                out.insert(p.clone());
                args.iter().for_each(|a| a.names(out));
            }
            Formula::Eq(a, b) => {
                a.names(out);
                b.names(out);
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.names(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.names(out);
                b.names(out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                out.insert(x.clone());
                f.names(out);
            }
            Formula::Def(d) => d.names(out),
        }
    }

    /// Object symbols bound by some quantifier or rule anywhere inside.
    pub fn bound_objects(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Atom(..) | Formula::Eq(..) | Formula::True | Formula::False => {}
            Formula::Not(f) => f.bound_objects(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.bound_objects(out);
                b.bound_objects(out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                out.insert(x.clone());
                f.bound_objects(out);
            }
            Formula::Def(d) => {
                for r in &d.rules {
                    out.extend(r.bound.iter().cloned());
                    r.body.bound_objects(out);
                }
            }
        }
    }

    /// Predicates, functions and free objects, descending into definitions.
    pub fn vocab(&self) -> Vocab {
        let mut v = Vocab::default();
        self.vocab_into(&mut v);
        v.objects = self.free_objects();
        v
    }

    fn vocab_into(&self, v: &mut Vocab) {
        match self {
            Formula::Atom(p, args) => {
                v.preds.insert(p.clone(), args.len());
                args.iter().for_each(|a| a.vocab(v));
            }
            Formula::Eq(a, b) => {
                a.vocab(v);
                b.vocab(v);
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.vocab_into(v),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.vocab_into(v);
                b.vocab_into(v);
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => f.vocab_into(v),
            Formula::Def(d) => {
                for r in &d.rules {
                    v.preds.insert(r.head.clone(), r.args.len());
                    r.args.iter().for_each(|a| a.vocab(v));
                    r.body.vocab_into(v);
                }
            }
        }
    }

    pub fn is_pure_fo(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::Eq(..) | Formula::True | Formula::False => true,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.is_pure_fo(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_pure_fo() && b.is_pure_fo()
            }
            Formula::Def(_) => false,
        }
    }

    /// `φ[t/x]`, capture-avoiding.
    pub fn substitute(&self, t: &Term, x: &Name) -> Formula {
        self.subst(&[(x.clone(), t.clone())])
    }

    /// Simultaneous capture-avoiding substitution.
    pub fn subst(&self, sigma: &[(Name, Term)]) -> Formula {
        if sigma.is_empty() {
            return self.clone();
        }
        let mut used = HashSet::new();
        self.names(&mut used);
        for (x, t) in sigma {
            used.insert(x.clone());
            t.names(&mut used);
        }
        self.subst_in(sigma, &mut used)
    }

    fn subst_in(&self, sigma: &[(Name, Term)], used: &mut HashSet<Name>) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.subst(sigma)).collect()),
            Formula::Eq(a, b) => Formula::Eq(a.subst(sigma), b.subst(sigma)),
            Formula::True | Formula::False => self.clone(),
            Formula::Not(f) => Formula::not(f.subst_in(sigma, used)),
            Formula::And(a, b) => Formula::and(a.subst_in(sigma, used), b.subst_in(sigma, used)),
            Formula::Or(a, b) => Formula::or(a.subst_in(sigma, used), b.subst_in(sigma, used)),
            Formula::Implies(a, b) => Formula::implies(a.subst_in(sigma, used), b.subst_in(sigma, used)),
            Formula::Iff(a, b) => Formula::iff(a.subst_in(sigma, used), b.subst_in(sigma, used)),
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                let free = f.free_objects();
                let inner: Vec<(Name, Term)> =
                    sigma.iter().filter(|(y, _)| y != x && free.contains(y)).cloned().collect();
                if inner.is_empty() {
                    return self.clone();
                }
                let (x, body) = if inner.iter().any(|(_, t)| t.mentions(x)) {
                    let x2 = fresh(x, used);
                    let renamed = f.subst_in(&[(x.clone(), Term::Obj(x2.clone()))], used);
                    (x2, renamed)
                } else {
                    (x.clone(), (**f).clone())
                };
                let body = Box::new(body.subst_in(&inner, used));
                match self {
                    Formula::Forall(..) => Formula::Forall(x, body),
                    _ => Formula::Exists(x, body),
                }
            }
            Formula::Def(d) => Formula::Def(Arc::new(d.subst_in(sigma, used))),
        }
    }

    /// Polarity of every occurrence of `q`, keyed by position path.
    pub fn polarity(&self, q: &str) -> Vec<(Vec<usize>, Polarity)> {
        let mut out = Vec::new();
        self.polarity_in(q, Polarity::Positive, &mut Vec::new(), &mut out);
        out
    }

    /// Joined polarity of all occurrences of `q`, if any.
    pub fn polarity_of(&self, q: &str) -> Option<Polarity> {
        self.polarity(q).into_iter().map(|(_, p)| p).reduce(Polarity::join)
    }

    fn polarity_in(&self, q: &str, pol: Polarity, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Polarity)>) {
        let child = |f: &Formula, i: usize, p: Polarity, path: &mut Vec<usize>, out: &mut Vec<_>| {
            path.push(i);
            f.polarity_in(q, p, path, out);
            path.pop();
        };
        match self {
            Formula::Atom(p, _) => {
                if &**p == q {
                    out.push((path.clone(), pol));
                }
            }
            Formula::Eq(..) | Formula::True | Formula::False => {}
            Formula::Not(f) => child(f, 0, pol.flip(), path, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                child(a, 0, pol, path, out);
                child(b, 1, pol, path, out);
            }
            Formula::Implies(a, b) => {
                child(a, 0, pol.flip(), path, out);
                child(b, 1, pol, path, out);
            }
            Formula::Iff(a, b) => {
                child(a, 0, Polarity::Both, path, out);
                child(b, 1, Polarity::Both, path, out);
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => child(f, 0, pol, path, out),
            Formula::Def(d) => {
                for (i, r) in d.rules.iter().enumerate() {
                    if &*r.head == q {
                        let mut p = path.clone();
                        p.push(i);
                        out.push((p, Polarity::Both));
                    }
                    child(&r.body, i, Polarity::Both, path, out);
                }
            }
        }
    }

    /// `φ[F_Π/Π⁺]`: positive occurrences of hypothesis keys replaced.
    pub fn replace_positive(&self, hyps: &Hyps) -> Result<Formula, LogicError> {
        if hyps.is_empty() {
            return Ok(self.clone());
        }
        let mut used = HashSet::new();
        self.names(&mut used);
        let mut params = BTreeSet::new();
        for (q, h) in hyps {
            used.insert(q.clone());
            h.formula.names(&mut used);
            used.extend(h.vars.iter().cloned());
            params.extend(h.formula.free_objects().into_iter().filter(|o| !h.vars.contains(o)));
        }
        self.replace_in(hyps, &params, Polarity::Positive, &mut used)
    }

    fn mentions_any(&self, hyps: &Hyps) -> bool {
        hyps.keys().any(|q| self.polarity_of(q).is_some())
    }

    fn replace_in(
        &self,
        hyps: &Hyps,
        params: &BTreeSet<Name>,
        pol: Polarity,
        used: &mut HashSet<Name>,
    ) -> Result<Formula, LogicError> {
        let rec = |f: &Formula, p: Polarity, used: &mut HashSet<Name>| f.replace_in(hyps, params, p, used);
        Ok(match self {
            Formula::Atom(p, args) => match hyps.get(p) {
                Some(_) if pol == Polarity::Both => return Err(LogicError::BothPolarity(p.clone())),
                Some(h) if pol == Polarity::Positive => {
                    let sigma: Vec<(Name, Term)> = h.vars.iter().cloned().zip(args.iter().cloned()).collect();
                    h.formula.subst(&sigma)
                }
                _ => self.clone(),
            },
            Formula::Eq(..) | Formula::True | Formula::False => self.clone(),
            Formula::Not(f) => Formula::not(rec(f, pol.flip(), used)?),
            Formula::And(a, b) => Formula::and(rec(a, pol, used)?, rec(b, pol, used)?),
            Formula::Or(a, b) => Formula::or(rec(a, pol, used)?, rec(b, pol, used)?),
            Formula::Implies(a, b) => Formula::implies(rec(a, pol.flip(), used)?, rec(b, pol, used)?),
            Formula::Iff(a, b) => Formula::iff(rec(a, Polarity::Both, used)?, rec(b, Polarity::Both, used)?),
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                let (x, body) = if params.contains(x) && f.mentions_any(hyps) {
                    let x2 = fresh(x, used);
                    (x2.clone(), f.subst_in(&[(x.clone(), Term::Obj(x2))], used))
                } else {
                    (x.clone(), (**f).clone())
                };
                let body = Box::new(rec(&body, pol, used)?);
                match self {
                    Formula::Forall(..) => Formula::Forall(x, body),
                    _ => Formula::Exists(x, body),
                }
            }
            Formula::Def(_) => {
                if self.mentions_any(hyps) {
                    let q = hyps.keys().find(|q| self.polarity_of(q).is_some()).unwrap();
                    return Err(LogicError::BothPolarity(q.clone()));
                }
                self.clone()
            }
        })
    }
}

/// `base'k` for the least `k ≥ 1` not in `used`; the result is added to `used`.
pub fn fresh(base: &str, used: &mut HashSet<Name>) -> Name {
    let root = match base.find('\'') {
        Some(i) if base[i + 1..].chars().all(|c| c.is_ascii_digit() || c == '\'') => &base[..i],
        _ => base,
    };
    let root = if root.is_empty() { "x" } else { root };
    let mut k = 1usize;
    loop {
        let cand: Name = Arc::from(format!("{root}'{k}").as_str());
        if !used.contains(&cand) {
            used.insert(cand.clone());
            return cand;
        }
        k += 1;
    }
}

/// Like [`fresh`] but returns `base` itself when unused.
pub fn fresh_or_same(base: &str, used: &mut HashSet<Name>) -> Name {
    let n = name(base);
    if used.insert(n.clone()) {
        n
    } else {
        fresh(base, used)
    }
}

// ---------------------------------------------------------------- definitions

impl Rule {
    pub fn free_objects(&self) -> BTreeSet<Name> {
        let mut out = self.body.free_objects();
        self.args.iter().for_each(|a| a.objects(&mut out));
        out.retain(|o| !self.bound.contains(o));
        out
    }

    pub fn head_atom(&self) -> Formula {
        Formula::Atom(self.head.clone(), self.args.clone())
    }

    /// `P(t̄[s̄/x̄])` and `φ[s̄/x̄]`.
    pub fn instantiate(&self, witnesses: &[Term]) -> (Formula, Formula) {
        let sigma: Vec<(Name, Term)> = self.bound.iter().cloned().zip(witnesses.iter().cloned()).collect();
        (self.head_atom().subst(&sigma), self.body.subst(&sigma))
    }
}

impl Definition {
    pub fn new(rules: Vec<Rule>) -> Result<Definition, LogicError> {
        for (i, r) in rules.iter().enumerate() {
            if !r.body.is_pure_fo() {
                return Err(LogicError::InvalidDefinition(format!("body of rule {i} is not first-order")));
            }
            let distinct: BTreeSet<&Name> = r.bound.iter().collect();
            if distinct.len() != r.bound.len() {
                return Err(LogicError::InvalidDefinition(format!("rule {i} binds a variable twice")));
            }
            for (j, other) in rules.iter().enumerate() {
                if i == j {
                    continue;
                }
                let free = other.free_objects();
                if let Some(x) = r.bound.iter().find(|x| free.contains(*x)) {
                    return Err(LogicError::InvalidDefinition(format!(
                        "variable {x} of rule {i} occurs free in rule {j}"
                    )));
                }
            }
        }
        Ok(Definition { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Defined predicates in order of first appearance.
    pub fn defined(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        for r in &self.rules {
            if !out.contains(&r.head) {
                out.push(r.head.clone());
            }
        }
        out
    }

    pub fn defines(&self, p: &str) -> bool {
        self.rules.iter().any(|r| &*r.head == p)
    }

    pub fn arity(&self, p: &str) -> Option<usize> {
        self.rules.iter().find(|r| &*r.head == p).map(|r| r.args.len())
    }

    pub fn free_objects(&self) -> BTreeSet<Name> {
        self.rules.iter().flat_map(|r| r.free_objects()).collect()
    }

    pub fn names(&self, out: &mut HashSet<Name>) {
        for r in &self.rules {
            out.extend(r.bound.iter().cloned());
            out.insert(r.head.clone());
            r.args.iter().for_each(|a| a.names(out));
            r.body.names(out);
        }
    }

    /// All symbols of the definition.
    pub fn vocab(&self) -> Vocab {
        Formula::Def(Arc::new(self.clone())).vocab()
    }

    /// Parameters: every symbol that is not a defined predicate.
    pub fn pars(&self) -> Vocab {
        let mut v = self.vocab();
        for d in self.defined() {
            v.preds.remove(&d);
        }
        v
    }

    fn subst_in(&self, sigma: &[(Name, Term)], used: &mut HashSet<Name>) -> Definition {
        let rules = self
            .rules
            .iter()
            .map(|r| {
                let free = r.free_objects();
                let inner: Vec<(Name, Term)> =
                    sigma.iter().filter(|(y, _)| free.contains(y)).cloned().collect();
                if inner.is_empty() {
                    return r.clone();
                }
                let mut r = r.clone();
                for i in 0..r.bound.len() {
                    let x = r.bound[i].clone();
                    if inner.iter().any(|(_, t)| t.mentions(&x)) {
                        let x2 = fresh(&x, used);
                        let ren = [(x.clone(), Term::Obj(x2.clone()))];
                        r.args = r.args.iter().map(|a| a.subst(&ren)).collect();
                        r.body = r.body.subst_in(&ren, used);
                        r.bound[i] = x2;
                    }
                }
                r.args = r.args.iter().map(|a| a.subst(&inner)).collect();
                r.body = r.body.subst_in(&inner, used);
                r
            })
            .collect();
        Definition { rules }
    }

    /// `φ_P(ȳ)`: disjunction over P-rules of `∃x̄: ȳ = t̄ ∧ φ`.
    pub fn merged_body(&self, p: &str, ys: &[Name]) -> Result<Formula, LogicError> {
        let rules: Vec<&Rule> = self.rules.iter().filter(|r| &*r.head == p).collect();
        if rules.is_empty() {
            return Err(LogicError::NotDefined(name(p)));
        }
        let distinct: BTreeSet<&Name> = ys.iter().collect();
        let clash = rules.iter().any(|r| {
            let free = r.free_objects();
            ys.iter().any(|y| free.contains(y) || r.bound.contains(y))
        });
        if clash || distinct.len() != ys.len() || ys.len() != rules[0].args.len() {
            return Err(LogicError::BadFreshTuple(ys.to_vec(), name(p)));
        }
        let yt: Vec<Term> = ys.iter().cloned().map(Term::Obj).collect();
        let disjuncts = rules.into_iter().map(|r| {
            let inner = match Formula::tuple_eq(&yt, &r.args) {
                Some(eq) => Formula::and(eq, r.body.clone()),
                None => r.body.clone(),
            };
            Formula::exists_all(&r.bound, inner)
        });
        Ok(disjuncts.reduce(Formula::or).unwrap())
    }

    /// A tuple of `k` names fresh for the whole definition.
    pub fn fresh_tuple(&self, k: usize, used: &mut HashSet<Name>) -> Vec<Name> {
        self.names(used);
        (0..k).map(|_| fresh_or_same("y", used)).collect()
    }

    /// `N(Φ)`: one rule per defined predicate with its merged body.
    pub fn normalize(&self) -> Definition {
        let mut used = HashSet::new();
        self.names(&mut used);
        let rules = self
            .defined()
            .into_iter()
            .map(|p| {
                let k = self.arity(&p).unwrap();
                let ys = self.fresh_tuple(k, &mut used);
                let body = self.merged_body(&p, &ys).expect("fresh tuple");
                Rule {
                    bound: ys.clone(),
                    head: p,
                    args: ys.into_iter().map(Term::Obj).collect(),
                    body,
                }
            })
            .collect();
        Definition { rules }
    }

    /// Direct dependency edges between defined predicates with their polarity.
    fn edges(&self) -> Vec<(Name, Name, Polarity)> {
        let defined = self.defined();
        let mut out = Vec::new();
        for r in &self.rules {
            for q in &defined {
                if let Some(pol) = r.body.polarity_of(q) {
                    out.push((r.head.clone(), q.clone(), pol));
                }
            }
        }
        out
    }

    /// A level map satisfying the stratification conditions, if one exists.
    pub fn stratify(&self) -> Option<BTreeMap<Name, usize>> {
        let defined = self.defined();
        let mut g = DiGraph::<Name, bool>::new();
        let idx: BTreeMap<Name, _> = defined.iter().map(|p| (p.clone(), g.add_node(p.clone()))).collect();
        for (p, q, pol) in self.edges() {
            g.add_edge(idx[&p], idx[&q], pol != Polarity::Positive);
        }
        // tarjan_scc yields components in reverse topological order: dependencies first
        let sccs = tarjan_scc(&g);
        let mut comp = vec![0usize; g.node_count()];
        for (c, nodes) in sccs.iter().enumerate() {
            for n in nodes {
                comp[n.index()] = c;
            }
        }
        let mut level = vec![0usize; sccs.len()];
        for (c, nodes) in sccs.iter().enumerate() {
            let mut l = 0;
            for n in nodes {
                for e in g.edges(*n) {
                    use petgraph::visit::EdgeRef;
                    let tc = comp[e.target().index()];
                    let neg = *e.weight();
                    if tc == c {
                        if neg {
                            return None;
                        }
                    } else {
                        l = l.max(level[tc] + usize::from(neg));
                    }
                }
            }
            level[c] = l;
        }
        Some(defined.iter().map(|p| (p.clone(), level[comp[idx[p].index()]])).collect())
    }

    /// Rules grouped by stratum, lowest level first.
    pub fn decompose_stratified(&self) -> Result<Vec<Definition>, LogicError> {
        let levels = self.stratify().ok_or(LogicError::NotStratified)?;
        let mut used: Vec<usize> = levels.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
        used.sort();
        Ok(used
            .into_iter()
            .map(|l| Definition {
                rules: self.rules.iter().filter(|r| levels[&r.head] == l).cloned().collect(),
            })
            .collect())
    }

    /// Reflexive-transitive closure of direct dependency among defined predicates.
    pub fn dependencies(&self) -> BTreeMap<Name, BTreeSet<Name>> {
        let defined = self.defined();
        let mut dep: BTreeMap<Name, BTreeSet<Name>> =
            defined.iter().map(|p| (p.clone(), BTreeSet::from([p.clone()]))).collect();
        for (p, q, _) in self.edges() {
            dep.get_mut(&p).unwrap().insert(q);
        }
        loop {
            let mut changed = false;
            for p in &defined {
                let reach: BTreeSet<Name> =
                    dep[p].iter().flat_map(|q| dep[q].iter().cloned()).collect();
                let e = dep.get_mut(p).unwrap();
                let before = e.len();
                e.extend(reach);
                changed |= e.len() != before;
            }
            if !changed {
                return dep;
            }
        }
    }

    /// `MD(P) = {Q | P dep Q and Q dep P}`.
    pub fn mutual_dependents(&self, p: &str) -> Result<BTreeSet<Name>, LogicError> {
        let dep = self.dependencies();
        let mine = dep.get(p).ok_or_else(|| LogicError::NotDefined(name(p)))?;
        Ok(mine.iter().filter(|q| dep[*q].iter().any(|r| &**r == p)).cloned().collect())
    }

    /// Check that `hyps` fit this definition: known predicates, right arity,
    /// distinct pure-first-order hypotheses.
    pub fn check_hyps(&self, hyps: &Hyps) -> Result<(), LogicError> {
        for (q, h) in hyps {
            let Some(k) = self.arity(q) else {
                return Err(LogicError::NotDefined(q.clone()));
            };
            if h.vars.len() != k {
                return Err(LogicError::InvalidHypothesis(q.clone(), format!("expects {k} variables")));
            }
            if h.vars.iter().collect::<BTreeSet<_>>().len() != k {
                return Err(LogicError::InvalidHypothesis(q.clone(), "variables not distinct".into()));
            }
            if !h.formula.is_pure_fo() {
                return Err(LogicError::InvalidHypothesis(q.clone(), "not first-order".into()));
            }
        }
        Ok(())
    }
}

fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::Atom(..) | Formula::Eq(..) | Formula::True | Formula::False => true,
        Formula::Not(g) => matches!(**g, Formula::Atom(..) | Formula::Eq(..) | Formula::True | Formula::False),
        _ => false,
    }
}

fn literal_body(f: &Formula) -> bool {
    match f {
        Formula::And(a, b) | Formula::Or(a, b) => literal_body(a) && literal_body(b),
        _ => is_literal(f),
    }
}

/// Outcome of the canonical-sequent check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonicity {
    pub canonical: bool,
    pub reasons: Vec<String>,
}

// ---------------------------------------------------------------- sequents

impl Sequent {
    pub fn new(left: impl IntoIterator<Item = Formula>, right: impl IntoIterator<Item = Formula>) -> Sequent {
        Sequent {
            left: left.into_iter().collect(),
            right: right.into_iter().collect(),
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(self.right.iter())
    }

    /// Definitions occurring directly in Γ, in order.
    pub fn definitions(&self) -> Vec<Arc<Definition>> {
        self.left
            .iter()
            .filter_map(|f| match f {
                Formula::Def(d) => Some(d.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn free_objects(&self) -> BTreeSet<Name> {
        self.formulas().flat_map(|f| f.free_objects()).collect()
    }

    pub fn names(&self) -> HashSet<Name> {
        let mut used = HashSet::new();
        self.formulas().for_each(|f| f.names(&mut used));
        used
    }

    pub fn vocab(&self) -> Vocab {
        let mut v = Vocab::default();
        self.formulas().for_each(|f| v.merge(&f.vocab()));
        v
    }

    pub fn subst(&self, sigma: &[(Name, Term)]) -> Sequent {
        Sequent::new(
            self.left.iter().map(|f| f.subst(sigma)),
            self.right.iter().map(|f| f.subst(sigma)),
        )
    }

    /// Regular: definitions only as top-level members of Γ.
    pub fn is_regular(&self) -> bool {
        self.left.iter().all(|f| matches!(f, Formula::Def(_)) || f.is_pure_fo())
            && self.right.iter().all(Formula::is_pure_fo)
    }

    pub fn is_canonical(&self) -> Canonicity {
        let mut reasons = Vec::new();
        if !self.is_regular() {
            reasons.push("definitions nested inside formulas or on the right".to_string());
        }
        let defs = self.definitions();
        for (i, d) in defs.iter().enumerate() {
            for (k, r) in d.rules().iter().enumerate() {
                if !literal_body(&r.body) {
                    reasons.push(format!("definition #{i} rule {k}: body is not built from literals with & and |"));
                }
            }
            let di: BTreeSet<Name> = d.defined().into_iter().collect();
            for (j, e) in defs.iter().enumerate().take(i) {
                let dj: BTreeSet<Name> = e.defined().into_iter().collect();
                if let Some(p) = di.intersection(&dj).next() {
                    reasons.push(format!("definitions #{j} and #{i} both define {p}"));
                }
                if let Some(p) = di.iter().find(|p| e.pars().preds.contains_key(*p)) {
                    reasons.push(format!("{p} defined by #{i} is a parameter of earlier definition #{j}"));
                }
            }
        }
        Canonicity {
            canonical: reasons.is_empty(),
            reasons,
        }
    }

    /// Replace negative parameter literals in definition bodies by fresh
    /// complement predicates, adding their defining equivalences to Γ.
    pub fn positive_rewriting(&self) -> Result<Sequent, LogicError> {
        let canon = self.is_canonical();
        if !canon.canonical {
            return Err(LogicError::NotCanonical(canon.reasons.join("; ")));
        }
        let mut used = self.names();
        let mut complements: IndexMap<Name, (Name, usize)> = IndexMap::new();
        let defs = self.definitions();
        for (i, d) in defs.iter().enumerate() {
            for r in d.rules() {
                for (q, k) in negated_atoms(&r.body) {
                    if d.defines(&q) {
                        return Err(LogicError::NegatedDefinedPredicate(q, i));
                    }
                    if !complements.contains_key(&q) {
                        let bar = fresh_or_same(&format!("{q}bar"), &mut used);
                        complements.insert(q, (bar, k));
                    }
                }
            }
        }
        let mut left: Vec<Formula> = self.left.iter().filter(|f| !matches!(f, Formula::Def(_))).cloned().collect();
        for (q, (bar, k)) in &complements {
            let ys: Vec<Name> = (0..*k).map(|_| fresh_or_same("y", &mut used)).collect();
            let args: Vec<Term> = ys.iter().cloned().map(Term::Obj).collect();
            let eq = Formula::iff(
                Formula::Atom(bar.clone(), args.clone()),
                Formula::not(Formula::Atom(q.clone(), args)),
            );
            left.push(Formula::forall_all(&ys, eq));
        }
        for d in &defs {
            let rules = d
                .rules()
                .iter()
                .map(|r| Rule {
                    body: replace_negated(&r.body, &complements),
                    ..r.clone()
                })
                .collect();
            left.push(Formula::Def(Arc::new(Definition::new(rules)?)));
        }
        Ok(Sequent::new(left, self.right.iter().cloned()))
    }
}

fn negated_atoms(f: &Formula) -> Vec<(Name, usize)> {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Atom(q, args) => vec![(q.clone(), args.len())],
            _ => Vec::new(),
        },
        Formula::And(a, b) | Formula::Or(a, b) => {
            let mut v = negated_atoms(a);
            v.extend(negated_atoms(b));
            v
        }
        _ => Vec::new(),
    }
}

fn replace_negated(f: &Formula, map: &IndexMap<Name, (Name, usize)>) -> Formula {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Atom(q, args) if map.contains_key(q) => Formula::Atom(map[q].0.clone(), args.clone()),
            _ => f.clone(),
        },
        Formula::And(a, b) => Formula::and(replace_negated(a, map), replace_negated(b, map)),
        Formula::Or(a, b) => Formula::or(replace_negated(a, map), replace_negated(b, map)),
        _ => f.clone(),
    }
}
