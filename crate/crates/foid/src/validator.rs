//! Brute-force validity of sequents over small finite domains.
//!
//! Object and function symbols are enumerated first (the "frame"), then the
//! open relations. Predicates defined by a definition that sits at the top
//! of the left-hand side are not enumerated: they are computed from the
//! rest of the structure (the well-founded model, or every stable model).
//! First-order formulas are checked as soon as their symbols are fixed, and
//! unit clauses fix atoms before relations are enumerated.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::semantics::{
    decode, index, CDef, CForm, Compiler, Elem, FuncTable, Interp, Layout, Relation, SatCtx, SemError, Semantics,
    Structure,
};
use crate::stable::{stable_models_compiled, StableError, DEFAULT_CAP};
use crate::syntax::{Formula, Name, Sequent, Vocab};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub max_n: usize,
    /// Bound on open relation atoms, and `2^cap` on candidates per size.
    pub cap: usize,
    /// Allow function symbols of arity two or more.
    pub wide_functions: bool,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            max_n: 3,
            cap: DEFAULT_CAP,
            wide_functions: false,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ValidateError {
    #[error("function {0} has arity {1}; wide functions are disabled")]
    WideFunction(Name, usize),
    #[error("structure space has {atoms} relation atoms, above the cap of {cap}")]
    SpaceTooLarge { atoms: usize, cap: usize },
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error("counterexample failed re-verification")]
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    NoCounterexample,
    Counterexample(Structure),
    /// The search space at `size` exceeded the budget; `bits` is its log2.
    Aborted { size: usize, bits: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub semantics: Semantics,
    /// Largest domain size searched completely.
    pub tested: usize,
    pub outcome: Outcome,
}

impl Verdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self.outcome, Outcome::Counterexample(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::NoCounterexample => write!(f, "no counterexample up to size {} ({})", self.tested, self.semantics),
            Outcome::Counterexample(s) => write!(f, "counterexample of size {} ({})", s.size, self.semantics),
            Outcome::Aborted { size, bits } => write!(
                f,
                "no counterexample up to size {} ({}); size {size} aborted, search space about 2^{bits}",
                self.tested, self.semantics
            ),
        }
    }
}

fn check_functions(v: &Vocab, cfg: &Config) -> Result<(), ValidateError> {
    match v.funcs.iter().find(|(_, a)| **a >= 2) {
        Some((f, a)) if !cfg.wide_functions => Err(ValidateError::WideFunction(f.clone(), *a)),
        _ => Ok(()),
    }
}

fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

/// Every structure of size `n` for `v`, in a fixed order.
pub fn enumerate_structures(v: &Vocab, n: usize, cfg: &Config) -> Result<Structures, ValidateError> {
    check_functions(v, cfg)?;
    let atoms: usize = v.preds.values().map(|a| pow(n, *a)).sum();
    if atoms > cfg.cap {
        return Err(ValidateError::SpaceTooLarge { atoms, cap: cfg.cap });
    }
    let mut radix = vec![n; v.objects.len()];
    for a in v.funcs.values() {
        radix.extend(std::iter::repeat_n(n, pow(n, *a)));
    }
    radix.extend(std::iter::repeat_n(2, atoms));
    Ok(Structures {
        v: v.clone(),
        n,
        digits: vec![0; radix.len()],
        radix,
        done: n == 0,
    })
}

/// Odometer over objects, function entries and relation atoms.
pub struct Structures {
    v: Vocab,
    n: usize,
    radix: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Structures {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        if self.done {
            return None;
        }
        let mut s = Structure::new(self.n);
        let mut d = self.digits.iter();
        for o in &self.v.objects {
            s.objects.insert(o.clone(), *d.next().unwrap() as Elem);
        }
        for (f, a) in &self.v.funcs {
            let values = (0..pow(self.n, *a)).map(|_| *d.next().unwrap() as Elem).collect();
            s.functions.insert(f.clone(), FuncTable { arity: *a, values });
        }
        for (p, a) in &self.v.preds {
            let mut r = Relation::empty(*a, self.n);
            for i in 0..r.len() {
                r.set(i, *d.next().unwrap() == 1);
            }
            s.relations.insert(p.clone(), r);
        }
        // advance, last digit fastest
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.radix[k] {
                break;
            }
            self.digits[k] = 0;
        }
        Some(s)
    }
}

// ---------------------------------------------------------------- search

/// A ground-instantiable clause `∀x̄: l₁ ∨ … ∨ lₖ`.
struct Clause {
    vars: usize,
    lits: Vec<(CForm, bool)>,
}

/// Clause form of `f` when it must have truth value `pos`.
fn clause_of(f: &Formula, pos: bool) -> Option<(Vec<Name>, Vec<(Formula, bool)>)> {
    let mut vars = Vec::new();
    let (mut f, mut pos) = (f, pos);
    loop {
        match (f, pos) {
            (Formula::Not(g), p) => (f, pos) = (g, !p),
            (Formula::Forall(x, g), true) | (Formula::Exists(x, g), false) => {
                if vars.contains(x) {
                    return None;
                }
                vars.push(x.clone());
                f = g;
            }
            _ => break,
        }
    }
    fn disj(f: &Formula, pos: bool, out: &mut Vec<(Formula, bool)>) -> Option<bool> {
        match (f, pos) {
            (Formula::Or(a, b), true) | (Formula::And(a, b), false) => Some(disj(a, pos, out)? || disj(b, pos, out)?),
            (Formula::Implies(a, b), true) => Some(disj(a, false, out)? || disj(b, true, out)?),
            (Formula::Not(g), p) => disj(g, !p, out),
            (Formula::Atom(..) | Formula::Eq(..), p) => {
                out.push((f.clone(), p));
                Some(false)
            }
            (Formula::True, true) | (Formula::False, false) => Some(true),
            (Formula::True, false) | (Formula::False, true) => Some(false),
            _ => None,
        }
    }
    let mut lits = Vec::new();
    let trivially_true = disj(f, pos, &mut lits)?;
    (!trivially_true).then_some((vars, lits))
}

struct Check {
    form: CForm,
    /// Required truth value: true on the left, false on the right.
    want: bool,
}

struct Plan {
    layout: Layout,
    n: usize,
    sem: Semantics,
    /// Function slots in enumeration order.
    funcs: Vec<usize>,
    /// Enumerated relation slots in enumeration order.
    rels: Vec<usize>,
    /// Checks to run after stage `k` (0: nothing assigned; then objects,
    /// functions, relations).
    staged: Vec<Vec<Check>>,
    late: Vec<Check>,
    sched: Vec<CDef>,
    clauses: Vec<Clause>,
    cap: usize,
}

struct Frame {
    it: Interp,
    rels: Vec<Relation>,
    free: Vec<Vec<usize>>,
}

enum Found {
    Cex(Structure),
    Abort(u32),
}

/// Definitions on the left whose defined predicates are computed rather
/// than enumerated, in an order where each one's parameters come first.
fn schedule(left: &[Formula]) -> (Vec<usize>, BTreeSet<Name>) {
    let mut claimed: BTreeSet<Name> = BTreeSet::new();
    let mut cands = Vec::new();
    for (i, f) in left.iter().enumerate() {
        if let Formula::Def(d) = f {
            let ds = d.defined();
            if ds.iter().all(|p| !claimed.contains(p)) {
                claimed.extend(ds);
                cands.push(i);
            }
        }
    }
    let defined = |i: usize| match &left[i] {
        Formula::Def(d) => d.defined(),
        _ => unreachable!(),
    };
    let opens = |i: usize| match &left[i] {
        Formula::Def(d) => d.pars().preds.into_keys().collect::<BTreeSet<_>>(),
        _ => unreachable!(),
    };
    let mut order = Vec::new();
    let mut rest = cands;
    loop {
        let pending: BTreeSet<Name> = rest.iter().flat_map(|&i| defined(i)).collect();
        match rest.iter().position(|&i| opens(i).is_disjoint(&pending)) {
            Some(k) => order.push(rest.remove(k)),
            None => break,
        }
    }
    // cyclic leftovers are enumerated and checked like any other formula
    for i in rest {
        for p in defined(i) {
            claimed.remove(&p);
        }
    }
    (order, claimed)
}

fn uses_any(f: &Formula, preds: &BTreeSet<Name>) -> bool {
    f.vocab().preds.keys().any(|p| preds.contains(p))
}

impl Plan {
    fn new(seq: &Sequent, v: &Vocab, n: usize, sem: Semantics, cap: usize) -> Result<Plan, ValidateError> {
        let layout = Layout::from_vocab(v);
        let left: Vec<Formula> = seq.left.iter().cloned().collect();
        let (order, claimed) = schedule(&left);
        let mut comp = Compiler::new(&layout, true);
        let mut sched = Vec::new();
        for &i in &order {
            let Formula::Def(d) = &left[i] else { unreachable!() };
            sched.push(comp.definition(d)?);
        }
        let mut funcs: Vec<usize> = (0..layout.funcs.len()).collect();
        funcs.sort_by_key(|&i| pow(n, layout.funcs[i]));
        let mut rels: Vec<usize> = (0..layout.preds.len())
            .filter(|&i| !claimed.contains(layout.preds.get_index(i).unwrap().0))
            .collect();
        rels.sort_by_key(|&i| layout.preds[i]);
        let stages = 1 + layout.objs.len() + funcs.len() + rels.len();
        let mut staged: Vec<Vec<Check>> = (0..stages).map(|_| Vec::new()).collect();
        let mut late = Vec::new();
        let mut clauses = Vec::new();
        let formulas = left
            .iter()
            .enumerate()
            .filter(|(i, _)| !order.contains(i))
            .map(|(_, f)| (f, true))
            .chain(seq.right.iter().map(|f| (f, false)));
        for (f, want) in formulas {
            let form = comp.formula(f)?;
            if !f.is_pure_fo() || uses_any(f, &claimed) {
                late.push(Check { form, want });
                continue;
            }
            let fv = f.vocab();
            let mut stage = 0;
            for o in &fv.objects {
                stage = stage.max(1 + layout.objs.get_index_of(o).unwrap());
            }
            for g in fv.funcs.keys() {
                let slot = layout.funcs.get_index_of(g).unwrap();
                stage = stage.max(1 + layout.objs.len() + funcs.iter().position(|&x| x == slot).unwrap());
            }
            for p in fv.preds.keys() {
                let slot = layout.pred(p).unwrap();
                stage = stage.max(1 + layout.objs.len() + funcs.len() + rels.iter().position(|&x| x == slot).unwrap());
            }
            if let Some((vars, lits)) = clause_of(f, want) {
                if vars.len() <= 4 {
                    let lits = lits
                        .iter()
                        .map(|(l, p)| Ok((comp.with_vars(&vars, l)?, *p)))
                        .collect::<Result<Vec<_>, SemError>>()?;
                    clauses.push(Clause { vars: vars.len(), lits });
                }
            }
            staged[stage].push(Check { form, want });
        }
        Ok(Plan {
            layout,
            n,
            sem,
            funcs,
            rels,
            staged,
            late,
            sched,
            clauses,
            cap,
        })
    }

    fn empty_rels(&self) -> Vec<Relation> {
        self.layout.preds.values().map(|a| Relation::empty(*a, self.n)).collect()
    }

    fn passes(&self, stage: usize, it: &Interp, rels: &[Relation]) -> bool {
        self.staged[stage].iter().all(|c| c.form.pair(it, rels, rels, &mut Vec::new()) == c.want)
    }

    /// Surviving frames with forced atoms applied; `Err` carries the log2
    /// of the space when it is over budget.
    fn frames(&self) -> Result<Vec<Frame>, u32> {
        let n = self.n;
        let mut out = Vec::new();
        let mut space: f64 = 0.0;
        let rels0 = self.empty_rels();
        let k = self.layout.objs.len();
        let mut it = Interp {
            n,
            objs: vec![0; k],
            funcs: self
                .layout
                .funcs
                .values()
                .map(|a| FuncTable {
                    arity: *a,
                    values: vec![0; pow(n, *a)],
                })
                .collect(),
        };
        if !self.passes(0, &it, &rels0) {
            return Ok(out);
        }
        let mut over = false;
        self.frame_dfs(0, 0, &mut it, &rels0, &mut out, &mut space, &mut over);
        if over {
            return Err(space.log2().ceil() as u32);
        }
        Ok(out)
    }

    /// `used` counts the elements named so far: objects only take values up
    /// to `used`, which keeps one structure per isomorphism class of the
    /// object assignment.
    fn frame_dfs(&self, depth: usize, used: usize, it: &mut Interp, rels0: &[Relation], out: &mut Vec<Frame>, space: &mut f64, over: &mut bool) {
        let k = self.layout.objs.len();
        if depth < k {
            for v in 0..self.n.min(used + 1) {
                it.objs[depth] = v as Elem;
                if self.passes(depth + 1, it, rels0) {
                    self.frame_dfs(depth + 1, used.max(v + 1), it, rels0, out, space, over);
                }
            }
            return;
        }
        if depth < k + self.funcs.len() {
            let slot = self.funcs[depth - k];
            let len = it.funcs[slot].values.len();
            let total = pow(self.n, len);
            for code in 0..total {
                let mut c = code;
                for e in 0..len {
                    it.funcs[slot].values[len - 1 - e] = (c % self.n) as Elem;
                    c /= self.n;
                }
                if self.passes(depth + 1, it, rels0) {
                    self.frame_dfs(depth + 1, used, it, rels0, out, space, over);
                }
            }
            return;
        }
        let Some(frame) = self.force(it) else { return };
        let free: usize = frame.free.iter().map(Vec::len).sum();
        *space += 2f64.powi(free as i32);
        // past the budget only the size of the space is still tracked
        if free > self.cap || *space > 2f64.powi(self.cap as i32) {
            out.clear();
            *over = true;
        }
        if !*over {
            out.push(frame);
        }
    }

    /// Apply unit clauses; `None` if they conflict.
    fn force(&self, it: &Interp) -> Option<Frame> {
        let n = self.n;
        let mut rels = self.empty_rels();
        let mut fixed: Vec<Vec<Option<bool>>> = rels.iter().map(|r| vec![None; r.len()]).collect();
        let scratch = self.empty_rels();
        for c in &self.clauses {
            let mut env = vec![0 as Elem; c.vars];
            for code in 0..pow(n, c.vars) {
                let mut x = code;
                for e in env.iter_mut().rev() {
                    *e = (x % n) as Elem;
                    x /= n;
                }
                let mut unit = None;
                let mut count = 0;
                let mut sat = false;
                for (l, p) in &c.lits {
                    match l {
                        CForm::Atom(slot, args) => {
                            count += 1;
                            let t: Vec<Elem> = args.iter().map(|a| a.eval(it, &env)).collect();
                            unit = Some((*slot, index(&t, n), *p));
                        }
                        _ => {
                            if l.pair(it, &scratch, &scratch, &mut env.clone()) == *p {
                                sat = true;
                                break;
                            }
                        }
                    }
                }
                if sat || count > 1 {
                    continue;
                }
                let (slot, i, v) = unit?;
                match fixed[slot][i] {
                    Some(w) if w != v => return None,
                    _ => fixed[slot][i] = Some(v),
                }
            }
        }
        let mut free = Vec::new();
        for &s in &self.rels {
            let mut fr = Vec::new();
            for (i, f) in fixed[s].iter().enumerate() {
                match f {
                    Some(v) => rels[s].set(i, *v),
                    None => fr.push(i),
                }
            }
            free.push(fr);
        }
        Some(Frame {
            it: it.clone(),
            rels,
            free,
        })
    }

    fn search_frame(&self, f: &Frame) -> Result<Option<Structure>, ValidateError> {
        let stage0 = 1 + self.layout.objs.len() + self.funcs.len();
        if !self.passes(stage0 - 1, &f.it, &f.rels) {
            return Ok(None);
        }
        let mut rels = f.rels.clone();
        self.rel_dfs(0, f, &mut rels)
    }

    fn rel_dfs(&self, k: usize, f: &Frame, rels: &mut Vec<Relation>) -> Result<Option<Structure>, ValidateError> {
        if k == self.rels.len() {
            return self.leaf(0, &f.it, rels);
        }
        let slot = self.rels[k];
        let free = &f.free[k];
        let stage = 1 + self.layout.objs.len() + self.funcs.len() + k;
        for mask in 0u64..1 << free.len() {
            for (b, &i) in free.iter().enumerate() {
                rels[slot].set(i, mask >> b & 1 == 1);
            }
            if self.passes(stage, &f.it, rels) {
                if let Some(s) = self.rel_dfs(k + 1, f, rels)? {
                    return Ok(Some(s));
                }
            }
        }
        Ok(None)
    }

    fn leaf(&self, k: usize, it: &Interp, rels: &[Relation]) -> Result<Option<Structure>, ValidateError> {
        if k == self.sched.len() {
            let mut ctx = SatCtx::new(it, rels, self.sem);
            let cex = self.late.iter().all(|c| c.form.sat(&mut ctx, &mut Vec::new()) == c.want);
            return Ok(cex.then(|| self.layout.structure(it, rels)));
        }
        let d = &self.sched[k];
        match self.sem {
            Semantics::Wf => {
                let (lo, up) = crate::wf::fixpoint(d, it, rels, &mut Vec::new());
                if d.defined.iter().any(|(s, _)| lo[*s] != up[*s]) {
                    return Ok(None);
                }
                self.leaf(k + 1, it, &lo)
            }
            Semantics::Stable => {
                let models = match stable_models_compiled(d, it, rels, &mut Vec::new(), self.cap) {
                    Ok(m) => m,
                    Err(StableError::SpaceTooLarge { atoms, cap }) => return Err(ValidateError::SpaceTooLarge { atoms, cap }),
                    Err(_) => unreachable!("compiled input has a consistent frame"),
                };
                for m in models {
                    if let Some(s) = self.leaf(k + 1, it, &m)? {
                        return Ok(Some(s));
                    }
                }
                Ok(None)
            }
        }
    }
}

/// `I ⊨ Γ ⊢ Δ` under `sem`, straight from the definition.
pub fn sequent_holds(s: &Structure, seq: &Sequent, sem: Semantics) -> Result<bool, SemError> {
    for f in &seq.left {
        if !crate::semantics::satisfies(s, f, sem)? {
            return Ok(true);
        }
    }
    for f in &seq.right {
        if crate::semantics::satisfies(s, f, sem)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Search every structure of size `1..=max_n` for one falsifying `seq`.
pub fn validate(seq: &Sequent, sem: Semantics, cfg: &Config) -> Result<Verdict, ValidateError> {
    let v = seq.vocab();
    check_functions(&v, cfg)?;
    let mut tested = 0;
    for n in 1..=cfg.max_n {
        let plan = Plan::new(seq, &v, n, sem, cfg.cap)?;
        let frames = match plan.frames() {
            Ok(f) => f,
            Err(bits) => {
                return Ok(Verdict {
                    semantics: sem,
                    tested,
                    outcome: Outcome::Aborted { size: n, bits },
                })
            }
        };
        let found = frames.par_iter().find_map_first(|f| match plan.search_frame(f) {
            Ok(Some(s)) => Some(Ok(Found::Cex(s))),
            Ok(None) => None,
            Err(ValidateError::SpaceTooLarge { atoms, .. }) => Some(Ok(Found::Abort(atoms as u32))),
            Err(e) => Some(Err(e)),
        });
        match found.transpose()? {
            Some(Found::Cex(s)) => {
                if sequent_holds(&s, seq, sem)? {
                    return Err(ValidateError::Unverified);
                }
                return Ok(Verdict {
                    semantics: sem,
                    tested,
                    outcome: Outcome::Counterexample(s),
                });
            }
            Some(Found::Abort(bits)) => {
                return Ok(Verdict {
                    semantics: sem,
                    tested,
                    outcome: Outcome::Aborted { size: n, bits },
                })
            }
            None => tested = n,
        }
    }
    Ok(Verdict {
        semantics: sem,
        tested,
        outcome: Outcome::NoCounterexample,
    })
}

/// Plain exhaustive search, without computed predicates or pruning; the
/// reference the optimized search is tested against.
pub fn validate_naive(seq: &Sequent, sem: Semantics, cfg: &Config) -> Result<Verdict, ValidateError> {
    let v = seq.vocab();
    let mut tested = 0;
    for n in 1..=cfg.max_n {
        for s in enumerate_structures(&v, n, cfg)? {
            if !sequent_holds(&s, seq, sem)? {
                return Ok(Verdict {
                    semantics: sem,
                    tested,
                    outcome: Outcome::Counterexample(s),
                });
            }
        }
        tested = n;
    }
    Ok(Verdict {
        semantics: sem,
        tested,
        outcome: Outcome::NoCounterexample,
    })
}

/// Decode a tuple index, for printing.
pub fn tuple(i: usize, arity: usize, n: usize) -> Vec<Elem> {
    decode(i, arity, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, parse_sequent};
    use crate::syntax::name;

    fn vocab(preds: &[(&str, usize)], funcs: &[(&str, usize)], objs: &[&str]) -> Vocab {
        let mut v = Vocab::default();
        for (p, a) in preds {
            v.preds.insert(name(p), *a);
        }
        for (f, a) in funcs {
            v.funcs.insert(name(f), *a);
        }
        for o in objs {
            v.objects.insert(name(o));
        }
        v
    }

    #[test]
    fn enumeration_counts() {
        let cfg = Config::default();
        assert_eq!(enumerate_structures(&vocab(&[("P", 0)], &[], &[]), 1, &cfg).unwrap().count(), 2);
        assert_eq!(enumerate_structures(&vocab(&[], &[("succ", 1)], &["zero"]), 2, &cfg).unwrap().count(), 8);
        assert_eq!(enumerate_structures(&vocab(&[("E", 2)], &[], &[]), 2, &cfg).unwrap().count(), 16);
        let all: Vec<Structure> = enumerate_structures(&vocab(&[("E", 2)], &[], &["c"]), 2, &cfg).unwrap().collect();
        let set: BTreeSet<&Structure> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        assert!(matches!(
            enumerate_structures(&vocab(&[], &[("and", 2)], &[]), 2, &cfg),
            Err(ValidateError::WideFunction(..))
        ));
    }

    fn seq(doc: &str, s: &str) -> Sequent {
        let d = parse(doc).unwrap();
        parse_sequent(&d, s).unwrap()
    }

    #[test]
    fn choice_separates_semantics() {
        let s = seq("pred P/0, Q/0. def Phi { P <- ~Q. Q <- ~P. }", "Phi |-");
        let cfg = Config::default();
        let wf = validate(&s, Semantics::Wf, &cfg).unwrap();
        assert_eq!(wf.outcome, Outcome::NoCounterexample);
        assert!(validate(&s, Semantics::Stable, &cfg).unwrap().is_counterexample());
        assert_eq!(validate_naive(&s, Semantics::Wf, &cfg).unwrap().outcome, Outcome::NoCounterexample);
    }

    #[test]
    fn falsum_fails_at_size_one() {
        let s = seq("", "|- false");
        let v = validate(&s, Semantics::Wf, &Config::default()).unwrap();
        match v.outcome {
            Outcome::Counterexample(st) => assert_eq!(st.size, 1),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn unit_clauses_agree_with_naive_search() {
        let d = "pred E/2, P/1. const a, b. fun f/1.";
        for text in [
            "E(a, b), ~E(b, a), forall x. E(x, a) => x = a |- P(a)",
            "forall x. ~E(x, x), E(a, f(a)) |- f(a) != a",
            "forall x. E(x, f(x)) | P(x) |- exists y. E(y, y)",
            "~(exists x, y. E(x, y)) |- forall x. ~P(x)",
        ] {
            let s = seq(d, text);
            let cfg = Config { max_n: 2, ..Config::default() };
            for sem in [Semantics::Wf, Semantics::Stable] {
                let fast = validate(&s, sem, &cfg).unwrap();
                let slow = validate_naive(&s, sem, &cfg).unwrap();
                assert_eq!(fast.is_counterexample(), slow.is_counterexample(), "{text}");
            }
        }
    }

    #[test]
    fn computed_definitions_agree_with_naive_search() {
        let d = "pred Nat/1, E/1, Q/0. fun succ/1. const zero.
            def Phi { E(zero) <- true. forall n. E(succ(n)) <- Nat(n) & ~E(n). }";
        for text in ["Phi, Nat(zero) |- E(zero)", "Phi |- ~E(succ(zero))", "Phi, Q |- E(succ(succ(zero)))"] {
            let s = seq(d, text);
            let cfg = Config { max_n: 2, ..Config::default() };
            for sem in [Semantics::Wf, Semantics::Stable] {
                let fast = validate(&s, sem, &cfg).unwrap();
                let slow = validate_naive(&s, sem, &cfg).unwrap();
                assert_eq!(fast.is_counterexample(), slow.is_counterexample(), "{text} {sem}");
            }
        }
    }
}
