//! Finite structures, Kleene and pair evaluation.
//!
//! Formulas are compiled against a [`Layout`] that assigns every symbol a
//! slot, so the engines evaluate without name lookups. Bound variables live
//! on a value stack indexed by quantifier depth.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::syntax::{name, Definition, Formula, Name, Term, Vocab};

pub type Elem = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Truth {
    F,
    U,
    T,
}

impl Truth {
    pub fn not(self) -> Truth {
        match self {
            Truth::F => Truth::T,
            Truth::U => Truth::U,
            Truth::T => Truth::F,
        }
    }

    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::T
        } else {
            Truth::F
        }
    }

    /// Precision order: `u ≤p f`, `u ≤p t`.
    pub fn leq_p(self, other: Truth) -> bool {
        self == Truth::U || self == other
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::F => "f",
            Truth::U => "u",
            Truth::T => "t",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    Wf,
    Stable,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Wf => "wf",
            Semantics::Stable => "stable",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SemError {
    #[error("symbol {0} is not interpreted")]
    Uninterpreted(Name),
    #[error("formula contains a definition where a first-order formula is required")]
    NotPureFo,
    #[error("structures differ in domain or in non-predicate symbols")]
    DomainMismatch,
    #[error("symbol {0} is used with the wrong arity")]
    ArityMismatch(Name),
}

/// Subset of `D^k`, stored as a bitset in lexicographic tuple order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    arity: usize,
    len: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(arity: usize, n: usize) -> Relation {
        let len = n.pow(arity as u32);
        Relation {
            arity,
            len,
            bits: vec![0; len.div_ceil(64).max(1)],
        }
    }

    pub fn full(arity: usize, n: usize) -> Relation {
        let mut r = Relation::empty(arity, n);
        (0..r.len).for_each(|i| r.set(i, true));
        r
    }

    pub fn from_tuples(arity: usize, n: usize, tuples: impl IntoIterator<Item = Vec<Elem>>) -> Relation {
        let mut r = Relation::empty(arity, n);
        for t in tuples {
            r.set(index(&t, n), true);
        }
        r
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of domain atoms, `n^arity`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.bits[i / 64] |= 1 << (i % 64);
        } else {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, tuple: &[Elem], n: usize) -> bool {
        self.get(index(tuple, n))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn tuples(&self, n: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
        (0..self.len).filter(|i| self.get(*i)).map(move |i| decode(i, self.arity, n))
    }
}

/// Lexicographic index of a tuple over `{0..n-1}`.
pub fn index(tuple: &[Elem], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &v| acc * n + v as usize)
}

pub fn decode(mut i: usize, arity: usize, n: usize) -> Vec<Elem> {
    let mut out = vec![0; arity];
    for k in (0..arity).rev() {
        out[k] = (i % n) as Elem;
        i /= n;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncTable {
    pub arity: usize,
    pub values: Vec<Elem>,
}

impl FuncTable {
    pub fn apply(&self, args: &[Elem], n: usize) -> Elem {
        self.values[index(args, n)]
    }
}

/// Two-valued structure over `{0..size-1}`. Object symbols cover both
/// constants and assigned variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Structure {
    pub size: usize,
    pub objects: BTreeMap<Name, Elem>,
    pub functions: BTreeMap<Name, FuncTable>,
    pub relations: BTreeMap<Name, Relation>,
}

impl Structure {
    pub fn new(size: usize) -> Structure {
        Structure {
            size,
            ..Structure::default()
        }
    }

    pub fn holds(&self, p: &str, tuple: &[Elem]) -> Option<bool> {
        self.relations.get(p).map(|r| r.contains(tuple, self.size))
    }

    /// Same domain and identical object and function interpretations.
    pub fn same_frame(&self, other: &Structure) -> bool {
        self.size == other.size && self.objects == other.objects && self.functions == other.functions
    }

    /// Keep only the symbols of `v` (predicates, functions, objects).
    pub fn restrict(&self, v: &Vocab) -> Structure {
        Structure {
            size: self.size,
            objects: self.objects.iter().filter(|(k, _)| v.objects.contains(*k)).map(|(k, e)| (k.clone(), *e)).collect(),
            functions: self.functions.iter().filter(|(k, _)| v.funcs.contains_key(*k)).map(|(k, t)| (k.clone(), t.clone())).collect(),
            relations: self.relations.iter().filter(|(k, _)| v.preds.contains_key(*k)).map(|(k, r)| (k.clone(), r.clone())).collect(),
        }
    }
}

/// Three-valued structure as a `(lower, upper)` pair with `lower ⊆ upper`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThreeValued {
    pub lower: Structure,
    pub upper: Structure,
}

impl ThreeValued {
    pub fn exact(s: Structure) -> ThreeValued {
        ThreeValued {
            lower: s.clone(),
            upper: s,
        }
    }

    pub fn value(&self, p: &str, tuple: &[Elem]) -> Option<Truth> {
        let l = self.lower.holds(p, tuple)?;
        let u = self.upper.holds(p, tuple)?;
        Some(if l {
            Truth::T
        } else if u {
            Truth::U
        } else {
            Truth::F
        })
    }

    pub fn is_consistent(&self) -> bool {
        self.lower.same_frame(&self.upper)
            && self.lower.relations.keys().eq(self.upper.relations.keys())
            && self.lower.relations.iter().all(|(k, r)| r.is_subset(&self.upper.relations[k]))
    }

    pub fn is_two_valued(&self) -> bool {
        self.lower == self.upper
    }

    /// Atoms with value `u`, as `(predicate, tuple)`.
    pub fn unknown_atoms(&self) -> Vec<(Name, Vec<Elem>)> {
        let n = self.lower.size;
        let mut out = Vec::new();
        for (p, lo) in &self.lower.relations {
            let up = &self.upper.relations[p];
            for i in 0..lo.len() {
                if !lo.get(i) && up.get(i) {
                    out.push((p.clone(), decode(i, lo.arity(), n)));
                }
            }
        }
        out
    }
}

fn compare_three(a: &ThreeValued, b: &ThreeValued, pred: impl Fn(Truth, Truth) -> bool) -> Result<bool, SemError> {
    if !a.lower.same_frame(&b.lower) || !a.lower.relations.keys().eq(b.lower.relations.keys()) {
        return Err(SemError::DomainMismatch);
    }
    let n = a.lower.size;
    for (p, r) in &a.lower.relations {
        for i in 0..r.len() {
            let t = decode(i, r.arity(), n);
            if !pred(a.value(p, &t).unwrap(), b.value(p, &t).unwrap()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Pointwise truth order.
pub fn leq_t(a: &ThreeValued, b: &ThreeValued) -> Result<bool, SemError> {
    compare_three(a, b, |x, y| x <= y)
}

/// Pointwise precision order.
pub fn leq_p(a: &ThreeValued, b: &ThreeValued) -> Result<bool, SemError> {
    compare_three(a, b, Truth::leq_p)
}

// ---------------------------------------------------------------- compiled form

/// Slot assignment for every symbol of a vocabulary.
#[derive(Clone, Debug, Default)]
pub struct Layout {
    pub preds: IndexMap<Name, usize>,
    pub funcs: IndexMap<Name, usize>,
    pub objs: IndexSet<Name>,
}

/// Objects and function tables of a structure, in layout order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interp {
    pub n: usize,
    pub objs: Vec<Elem>,
    pub funcs: Vec<FuncTable>,
}

#[derive(Clone, Debug)]
pub enum CTerm {
    Var(usize),
    Obj(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
pub enum CForm {
    Atom(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    True,
    False,
    Not(Box<CForm>),
    And(Box<CForm>, Box<CForm>),
    Or(Box<CForm>, Box<CForm>),
    Imp(Box<CForm>, Box<CForm>),
    Iff(Box<CForm>, Box<CForm>),
    All(Box<CForm>),
    Ex(Box<CForm>),
    /// `∃x: x = t ∧ φ`, with `x` bound to the value of `t`.
    Let(CTerm, Box<CForm>),
    Def(Box<CDef>),
}

/// A definition compiled at a given quantifier depth; merged bodies expect
/// the head tuple on the stack right above `depth`.
#[derive(Clone, Debug)]
pub struct CDef {
    pub id: usize,
    pub depth: usize,
    pub defined: Vec<(usize, usize)>,
    pub bodies: Vec<CForm>,
    pub env_deps: Vec<usize>,
}

impl Layout {
    pub fn from_vocab(v: &Vocab) -> Layout {
        Layout {
            preds: v.preds.iter().map(|(k, a)| (k.clone(), *a)).collect(),
            funcs: v.funcs.iter().map(|(k, a)| (k.clone(), *a)).collect(),
            objs: v.objects.iter().cloned().collect(),
        }
    }

    pub fn pred(&self, p: &str) -> Option<usize> {
        self.preds.get_index_of(p)
    }

    pub fn interp(&self, s: &Structure) -> Result<Interp, SemError> {
        let objs = self
            .objs
            .iter()
            .map(|o| s.objects.get(o).copied().ok_or_else(|| SemError::Uninterpreted(o.clone())))
            .collect::<Result<_, _>>()?;
        let funcs = self
            .funcs
            .iter()
            .map(|(f, a)| match s.functions.get(f) {
                Some(t) if t.arity == *a => Ok(t.clone()),
                Some(_) => Err(SemError::ArityMismatch(f.clone())),
                None => Err(SemError::Uninterpreted(f.clone())),
            })
            .collect::<Result<_, _>>()?;
        Ok(Interp { n: s.size, objs, funcs })
    }

    /// Relations in layout order; predicates for which `skip` holds get an
    /// empty placeholder instead of being looked up.
    pub fn rels(&self, s: &Structure, skip: impl Fn(&Name) -> bool) -> Result<Vec<Relation>, SemError> {
        self.preds
            .iter()
            .map(|(p, a)| {
                if skip(p) {
                    return Ok(Relation::empty(*a, s.size));
                }
                match s.relations.get(p) {
                    Some(r) if r.arity() == *a => Ok(r.clone()),
                    Some(_) => Err(SemError::ArityMismatch(p.clone())),
                    None => Err(SemError::Uninterpreted(p.clone())),
                }
            })
            .collect()
    }

    pub fn structure(&self, it: &Interp, rels: &[Relation]) -> Structure {
        Structure {
            size: it.n,
            objects: self.objs.iter().cloned().zip(it.objs.iter().copied()).collect(),
            functions: self.funcs.keys().cloned().zip(it.funcs.iter().cloned()).collect(),
            relations: self.preds.keys().cloned().zip(rels.iter().cloned()).collect(),
        }
    }
}

/// Compiles formulas against a layout.
pub struct Compiler<'a> {
    pub layout: &'a Layout,
    scope: Vec<Name>,
    next_def: usize,
    allow_defs: bool,
}

impl<'a> Compiler<'a> {
    pub fn new(layout: &'a Layout, allow_defs: bool) -> Compiler<'a> {
        Compiler {
            layout,
            scope: Vec::new(),
            next_def: 0,
            allow_defs,
        }
    }

    /// Compile with `vars` bound to stack slots `0..vars.len()`.
    pub fn with_vars(&mut self, vars: &[Name], f: &Formula) -> Result<CForm, SemError> {
        let saved = std::mem::replace(&mut self.scope, vars.to_vec());
        let r = self.formula(f);
        self.scope = saved;
        r
    }

    pub fn term(&self, t: &Term) -> Result<CTerm, SemError> {
        match t {
            Term::Obj(x) => {
                if let Some(i) = self.scope.iter().rposition(|y| y == x) {
                    Ok(CTerm::Var(i))
                } else {
                    self.layout.objs.get_index_of(x).map(CTerm::Obj).ok_or_else(|| SemError::Uninterpreted(x.clone()))
                }
            }
            Term::App(f, args) => {
                let (i, _, a) = self.layout.funcs.get_full(f).ok_or_else(|| SemError::Uninterpreted(f.clone()))?;
                if *a != args.len() {
                    return Err(SemError::ArityMismatch(f.clone()));
                }
                Ok(CTerm::App(i, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?))
            }
        }
    }

    pub fn formula(&mut self, f: &Formula) -> Result<CForm, SemError> {
        let b = |c: CForm| Box::new(c);
        Ok(match f {
            Formula::Atom(p, args) => {
                let (i, _, a) = self.layout.preds.get_full(p).ok_or_else(|| SemError::Uninterpreted(p.clone()))?;
                if *a != args.len() {
                    return Err(SemError::ArityMismatch(p.clone()));
                }
                CForm::Atom(i, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?)
            }
            Formula::Eq(s, t) => CForm::Eq(self.term(s)?, self.term(t)?),
            Formula::True => CForm::True,
            Formula::False => CForm::False,
            Formula::Not(g) => CForm::Not(b(self.formula(g)?)),
            Formula::And(x, y) => CForm::And(b(self.formula(x)?), b(self.formula(y)?)),
            Formula::Or(x, y) => CForm::Or(b(self.formula(x)?), b(self.formula(y)?)),
            Formula::Implies(x, y) => CForm::Imp(b(self.formula(x)?), b(self.formula(y)?)),
            Formula::Iff(x, y) => CForm::Iff(b(self.formula(x)?), b(self.formula(y)?)),
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                self.scope.push(x.clone());
                let body = self.formula(g);
                self.scope.pop();
                let body = b(body?);
                if matches!(f, Formula::Forall(..)) {
                    CForm::All(body)
                } else {
                    CForm::Ex(body)
                }
            }
            Formula::Def(d) => {
                if !self.allow_defs {
                    return Err(SemError::NotPureFo);
                }
                CForm::Def(Box::new(self.definition(d)?))
            }
        })
    }

    /// Compile the merged bodies of `d` at the current depth.
    pub fn definition(&mut self, d: &Definition) -> Result<CDef, SemError> {
        let depth = self.scope.len();
        let mut used = std::collections::HashSet::new();
        self.scope.iter().for_each(|x| {
            used.insert(x.clone());
        });
        let mut defined = Vec::new();
        let mut bodies = Vec::new();
        for p in d.defined() {
            let (slot, _, a) = self.layout.preds.get_full(&p).ok_or_else(|| SemError::Uninterpreted(p.clone()))?;
            let ys = d.fresh_tuple(*a, &mut used.clone());
            self.scope.extend(ys.iter().cloned());
            let c = self.merged(d, &p, depth);
            self.scope.truncate(depth);
            defined.push((slot, *a));
            bodies.push(c?);
        }
        let mut env_deps = Vec::new();
        bodies.iter().for_each(|c| vars_below(c, depth, &mut env_deps));
        env_deps.sort();
        env_deps.dedup();
        let id = self.next_def;
        self.next_def += 1;
        Ok(CDef {
            id,
            depth,
            defined,
            bodies,
            env_deps,
        })
    }

    /// The merged body of `p`, with the head tuple at `base..`. A rule
    /// variable that occurs bare in the head is bound to that head value
    /// instead of being enumerated.
    fn merged(&mut self, d: &Definition, p: &str, base: usize) -> Result<CForm, SemError> {
        let mut out: Option<CForm> = None;
        for r in d.rules().iter().filter(|r| &*r.head == p) {
            let binders: Vec<Option<usize>> = r
                .bound
                .iter()
                .map(|x| r.args.iter().position(|t| matches!(t, Term::Obj(y) if y == x)))
                .collect();
            let top = self.scope.len();
            self.scope.extend(r.bound.iter().cloned());
            let compiled = (|| {
                let mut eqs = Vec::new();
                for (i, t) in r.args.iter().enumerate() {
                    if !binders.contains(&Some(i)) {
                        eqs.push(CForm::Eq(CTerm::Var(base + i), self.term(t)?));
                    }
                }
                Ok::<_, SemError>((eqs, self.formula(&r.body)?))
            })();
            self.scope.truncate(top);
            let (eqs, body) = compiled?;
            let mut c = eqs.into_iter().rev().fold(body, |acc, e| CForm::And(Box::new(e), Box::new(acc)));
            for b in binders.iter().rev() {
                c = match b {
                    Some(i) => CForm::Let(CTerm::Var(base + i), Box::new(c)),
                    None => CForm::Ex(Box::new(c)),
                };
            }
            out = Some(match out {
                None => c,
                Some(o) => CForm::Or(Box::new(o), Box::new(c)),
            });
        }
        out.ok_or_else(|| SemError::Uninterpreted(name(p)))
    }
}

fn vars_below(c: &CForm, depth: usize, out: &mut Vec<usize>) {
    fn term(t: &CTerm, depth: usize, out: &mut Vec<usize>) {
        match t {
            CTerm::Var(i) if *i < depth => out.push(*i),
            CTerm::App(_, args) => args.iter().for_each(|a| term(a, depth, out)),
            _ => {}
        }
    }
    match c {
        CForm::Atom(_, args) => args.iter().for_each(|a| term(a, depth, out)),
        CForm::Eq(a, b) => {
            term(a, depth, out);
            term(b, depth, out);
        }
        CForm::True | CForm::False => {}
        CForm::Not(g) | CForm::All(g) | CForm::Ex(g) => vars_below(g, depth, out),
        CForm::Let(t, g) => {
            term(t, depth, out);
            vars_below(g, depth, out);
        }
        CForm::And(a, b) | CForm::Or(a, b) | CForm::Imp(a, b) | CForm::Iff(a, b) => {
            vars_below(a, depth, out);
            vars_below(b, depth, out);
        }
        CForm::Def(d) => {
            d.bodies.iter().for_each(|b| vars_below(b, depth, out));
        }
    }
}

impl CTerm {
    #[inline]
    pub fn eval(&self, it: &Interp, env: &[Elem]) -> Elem {
        match self {
            CTerm::Var(i) => env[*i],
            CTerm::Obj(i) => it.objs[*i],
            CTerm::App(f, args) => {
                let mut idx = 0;
                for a in args {
                    idx = idx * it.n + a.eval(it, env) as usize;
                }
                it.funcs[*f].values[idx]
            }
        }
    }
}

#[inline]
fn atom_index(args: &[CTerm], it: &Interp, env: &[Elem]) -> usize {
    args.iter().fold(0, |acc, a| acc * it.n + a.eval(it, env) as usize)
}

impl CForm {
    /// `(I, J) ⊨ φ`: positive occurrences read from `i`, negative from `j`.
    pub fn pair(&self, it: &Interp, i: &[Relation], j: &[Relation], env: &mut Vec<Elem>) -> bool {
        match self {
            CForm::Atom(p, args) => i[*p].get(atom_index(args, it, env)),
            CForm::Eq(a, b) => a.eval(it, env) == b.eval(it, env),
            CForm::True => true,
            CForm::False => false,
            CForm::Not(g) => !g.pair(it, j, i, env),
            CForm::And(a, b) => a.pair(it, i, j, env) && b.pair(it, i, j, env),
            CForm::Or(a, b) => a.pair(it, i, j, env) || b.pair(it, i, j, env),
            CForm::Imp(a, b) => !a.pair(it, j, i, env) || b.pair(it, i, j, env),
            CForm::Iff(a, b) => {
                (!a.pair(it, j, i, env) || b.pair(it, i, j, env)) && (!b.pair(it, j, i, env) || a.pair(it, i, j, env))
            }
            CForm::All(g) => (0..it.n as Elem).all(|v| {
                env.push(v);
                let r = g.pair(it, i, j, env);
                env.pop();
                r
            }),
            CForm::Ex(g) => (0..it.n as Elem).any(|v| {
                env.push(v);
                let r = g.pair(it, i, j, env);
                env.pop();
                r
            }),
            CForm::Let(t, g) => {
                env.push(t.eval(it, env));
                let r = g.pair(it, i, j, env);
                env.pop();
                r
            }
            CForm::Def(_) => unreachable!("definitions are rejected when compiling first-order formulas"),
        }
    }

    /// Kleene value under the three-valued structure `(lo, up)`.
    pub fn kleene(&self, it: &Interp, lo: &[Relation], up: &[Relation], env: &mut Vec<Elem>) -> Truth {
        match self {
            CForm::Atom(p, args) => {
                let k = atom_index(args, it, env);
                if lo[*p].get(k) {
                    Truth::T
                } else if up[*p].get(k) {
                    Truth::U
                } else {
                    Truth::F
                }
            }
            CForm::Eq(a, b) => Truth::from_bool(a.eval(it, env) == b.eval(it, env)),
            CForm::True => Truth::T,
            CForm::False => Truth::F,
            CForm::Not(g) => g.kleene(it, lo, up, env).not(),
            CForm::And(a, b) => {
                let x = a.kleene(it, lo, up, env);
                if x == Truth::F {
                    return x;
                }
                x.min(b.kleene(it, lo, up, env))
            }
            CForm::Or(a, b) => {
                let x = a.kleene(it, lo, up, env);
                if x == Truth::T {
                    return x;
                }
                x.max(b.kleene(it, lo, up, env))
            }
            CForm::Imp(a, b) => a.kleene(it, lo, up, env).not().max(b.kleene(it, lo, up, env)),
            CForm::Iff(a, b) => {
                let x = a.kleene(it, lo, up, env);
                let y = b.kleene(it, lo, up, env);
                x.not().max(y).min(y.not().max(x))
            }
            CForm::All(g) => {
                let mut acc = Truth::T;
                for v in 0..it.n as Elem {
                    env.push(v);
                    acc = acc.min(g.kleene(it, lo, up, env));
                    env.pop();
                    if acc == Truth::F {
                        break;
                    }
                }
                acc
            }
            CForm::Ex(g) => {
                let mut acc = Truth::F;
                for v in 0..it.n as Elem {
                    env.push(v);
                    acc = acc.max(g.kleene(it, lo, up, env));
                    env.pop();
                    if acc == Truth::T {
                        break;
                    }
                }
                acc
            }
            CForm::Let(t, g) => {
                env.push(t.eval(it, env));
                let r = g.kleene(it, lo, up, env);
                env.pop();
                r
            }
            CForm::Def(_) => unreachable!("definitions are rejected when compiling first-order formulas"),
        }
    }

    /// Two-valued satisfaction where definitions are judged by `ctx`.
    pub fn sat(&self, ctx: &mut SatCtx<'_>, env: &mut Vec<Elem>) -> bool {
        match self {
            CForm::Def(d) => ctx.def_holds(d, env),
            CForm::Not(g) => !g.sat(ctx, env),
            CForm::And(a, b) => a.sat(ctx, env) && b.sat(ctx, env),
            CForm::Or(a, b) => a.sat(ctx, env) || b.sat(ctx, env),
            CForm::Imp(a, b) => !a.sat(ctx, env) || b.sat(ctx, env),
            CForm::Iff(a, b) => a.sat(ctx, env) == b.sat(ctx, env),
            CForm::All(g) => (0..ctx.it.n as Elem).all(|v| {
                env.push(v);
                let r = g.sat(ctx, env);
                env.pop();
                r
            }),
            CForm::Ex(g) => (0..ctx.it.n as Elem).any(|v| {
                env.push(v);
                let r = g.sat(ctx, env);
                env.pop();
                r
            }),
            CForm::Let(t, g) => {
                env.push(t.eval(ctx.it, env));
                let r = g.sat(ctx, env);
                env.pop();
                r
            }
            _ => self.pair(ctx.it, ctx.rels, ctx.rels, env),
        }
    }
}

/// Evaluation context for formulas with embedded definitions.
pub struct SatCtx<'a> {
    pub it: &'a Interp,
    pub rels: &'a [Relation],
    pub sem: Semantics,
    cache: HashMap<(usize, Vec<Elem>), bool>,
}

impl<'a> SatCtx<'a> {
    pub fn new(it: &'a Interp, rels: &'a [Relation], sem: Semantics) -> SatCtx<'a> {
        SatCtx {
            it,
            rels,
            sem,
            cache: HashMap::new(),
        }
    }

    fn def_holds(&mut self, d: &CDef, env: &mut Vec<Elem>) -> bool {
        let key = (d.id, d.env_deps.iter().map(|i| env[*i]).collect::<Vec<_>>());
        if let Some(v) = self.cache.get(&key) {
            return *v;
        }
        debug_assert_eq!(env.len(), d.depth);
        let v = match self.sem {
            Semantics::Wf => {
                let (lo, up) = crate::wf::fixpoint(d, self.it, self.rels, env);
                d.defined.iter().all(|(s, _)| lo[*s] == self.rels[*s] && up[*s] == self.rels[*s])
            }
            Semantics::Stable => {
                let st = crate::stable::stable_fixpoint(d, self.it, self.rels, env);
                d.defined.iter().all(|(s, _)| st[*s] == self.rels[*s])
            }
        };
        self.cache.insert(key, v);
        v
    }
}

// ---------------------------------------------------------------- public API

fn compile_fo(f: &Formula, s: &Structure) -> Result<(Layout, Interp, CForm), SemError> {
    if !f.is_pure_fo() {
        return Err(SemError::NotPureFo);
    }
    let layout = Layout::from_vocab(&f.vocab());
    let it = layout.interp(s)?;
    let c = Compiler::new(&layout, false).formula(f)?;
    Ok((layout, it, c))
}

/// Classical value of a first-order formula.
pub fn eval_two(s: &Structure, f: &Formula) -> Result<bool, SemError> {
    let (layout, it, c) = compile_fo(f, s)?;
    let rels = layout.rels(s, |_| false)?;
    Ok(c.pair(&it, &rels, &rels, &mut Vec::new()))
}

/// Kleene value of a first-order formula.
pub fn eval_kleene(a: &ThreeValued, f: &Formula) -> Result<Truth, SemError> {
    if !a.lower.same_frame(&a.upper) {
        return Err(SemError::DomainMismatch);
    }
    let (layout, it, c) = compile_fo(f, &a.lower)?;
    let lo = layout.rels(&a.lower, |_| false)?;
    let up = layout.rels(&a.upper, |_| false)?;
    Ok(c.kleene(&it, &lo, &up, &mut Vec::new()))
}

/// `(I, J) ⊨ φ`.
pub fn eval_pair(i: &Structure, j: &Structure, f: &Formula) -> Result<bool, SemError> {
    if !i.same_frame(j) {
        return Err(SemError::DomainMismatch);
    }
    let (layout, it, c) = compile_fo(f, i)?;
    let ri = layout.rels(i, |_| false)?;
    let rj = layout.rels(j, |_| false)?;
    Ok(c.pair(&it, &ri, &rj, &mut Vec::new()))
}

/// Two-valued satisfaction of an arbitrary formula under `sem`.
pub fn satisfies(s: &Structure, f: &Formula, sem: Semantics) -> Result<bool, SemError> {
    let layout = Layout::from_vocab(&f.vocab());
    let it = layout.interp(s)?;
    let rels = layout.rels(s, |_| false)?;
    let c = Compiler::new(&layout, true).formula(f)?;
    let mut ctx = SatCtx::new(&it, &rels, sem);
    Ok(c.sat(&mut ctx, &mut Vec::new()))
}
