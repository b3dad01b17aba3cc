//! Well-founded models by well-founded induction.
//!
//! The schedule is fixed: every unknown atom whose merged body is true is set
//! true in one batch, then the greatest unfounded set is set false. Finite
//! domains mean the induction always stops after finitely many steps.

use std::fmt;

use thiserror::Error;

use crate::semantics::{
    decode, CDef, Compiler, Elem, Interp, Layout, Relation, SemError, Semantics, Structure, ThreeValued, Truth,
};
use crate::syntax::{Definition, Formula, Name};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WfError {
    #[error("context does not fit the definition: {0}")]
    BadContext(String),
    #[error(transparent)]
    Sem(#[from] SemError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    True,
    Unfounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfStep {
    pub direction: Direction,
    pub atoms: Vec<(Name, Vec<Elem>)>,
    pub state: ThreeValued,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfTrace {
    pub initial: ThreeValued,
    pub steps: Vec<WfStep>,
}

impl fmt::Display for WfTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "step 0: all defined atoms u")?;
        for (i, s) in self.steps.iter().enumerate() {
            let dir = match s.direction {
                Direction::True => "t",
                Direction::Unfounded => "f",
            };
            let atoms: Vec<String> = s.atoms.iter().map(|(p, t)| fmt_atom(p, t)).collect();
            writeln!(f, "step {}: {} := {}", i + 1, atoms.join(", "), dir)?;
        }
        Ok(())
    }
}

pub fn fmt_atom(p: &str, t: &[Elem]) -> String {
    if t.is_empty() {
        p.to_string()
    } else {
        let args: Vec<String> = t.iter().map(|e| e.to_string()).collect();
        format!("{p}({})", args.join(","))
    }
}

/// Atom of a compiled definition: position in `defined` and tuple index.
type Atom = (usize, usize);

fn atoms(d: &CDef, n: usize) -> Vec<Atom> {
    d.defined
        .iter()
        .enumerate()
        .flat_map(|(k, (_, a))| (0..n.pow(*a as u32)).map(move |i| (k, i)))
        .collect()
}

fn body_kleene(d: &CDef, (k, i): Atom, it: &Interp, lo: &[Relation], up: &[Relation], env: &mut Vec<Elem>) -> Truth {
    let base = env.len();
    env.extend(decode(i, d.defined[k].1, it.n));
    let v = d.bodies[k].kleene(it, lo, up, env);
    env.truncate(base);
    v
}

fn unknown(d: &CDef, (k, i): Atom, lo: &[Relation], up: &[Relation]) -> bool {
    let s = d.defined[k].0;
    !lo[s].get(i) && up[s].get(i)
}

/// Greatest set of unknown atoms that can be made false together.
fn unfounded(d: &CDef, it: &Interp, lo: &[Relation], up: &[Relation], env: &mut Vec<Elem>) -> Vec<Atom> {
    let mut cand: Vec<Atom> = atoms(d, it.n).into_iter().filter(|a| unknown(d, *a, lo, up)).collect();
    loop {
        let mut trial = up.to_vec();
        for (k, i) in &cand {
            trial[d.defined[*k].0].set(*i, false);
        }
        let before = cand.len();
        cand.retain(|a| body_kleene(d, *a, it, lo, &trial, env) == Truth::F);
        if cand.len() == before {
            return cand;
        }
    }
}

/// Run the deterministic schedule; `rels` provides the context, defined
/// slots are overwritten. Returns the limit as `(lower, upper)`.
pub(crate) fn fixpoint(d: &CDef, it: &Interp, rels: &[Relation], env: &mut Vec<Elem>) -> (Vec<Relation>, Vec<Relation>) {
    run(d, it, rels, env, None)
}

type RawStep = (Direction, Vec<Atom>, Vec<Relation>, Vec<Relation>);

fn run(
    d: &CDef,
    it: &Interp,
    rels: &[Relation],
    env: &mut Vec<Elem>,
    mut trace: Option<&mut Vec<RawStep>>,
) -> (Vec<Relation>, Vec<Relation>) {
    let mut lo = rels.to_vec();
    let mut up = rels.to_vec();
    for (s, a) in &d.defined {
        lo[*s] = Relation::empty(*a, it.n);
        up[*s] = Relation::full(*a, it.n);
    }
    let all = atoms(d, it.n);
    loop {
        let tset: Vec<Atom> = all
            .iter()
            .copied()
            .filter(|a| unknown(d, *a, &lo, &up) && body_kleene(d, *a, it, &lo, &up, env) == Truth::T)
            .collect();
        for (k, i) in &tset {
            lo[d.defined[*k].0].set(*i, true);
        }
        if !tset.is_empty() {
            if let Some(t) = trace.as_deref_mut() {
                t.push((Direction::True, tset.clone(), lo.clone(), up.clone()));
            }
        }
        let uset = unfounded(d, it, &lo, &up, env);
        for (k, i) in &uset {
            up[d.defined[*k].0].set(*i, false);
        }
        if !uset.is_empty() {
            if let Some(t) = trace.as_deref_mut() {
                t.push((Direction::Unfounded, uset.clone(), lo.clone(), up.clone()));
            }
        }
        if tset.is_empty() && uset.is_empty() {
            return (lo, up);
        }
    }
}

/// Compiled definition together with the context it is evaluated in.
pub(crate) struct Problem {
    pub layout: Layout,
    pub it: Interp,
    pub rels: Vec<Relation>,
    pub cdef: CDef,
    pub ctx: Structure,
}

impl Problem {
    pub fn new(d: &Definition, ctx: &Structure) -> Result<Problem, WfError> {
        let defined = d.defined();
        if let Some(p) = defined.iter().find(|p| ctx.relations.contains_key(*p)) {
            return Err(WfError::BadContext(format!("context interprets defined predicate {p}")));
        }
        let layout = Layout::from_vocab(&d.vocab());
        let miss = |e: SemError| match e {
            SemError::Uninterpreted(s) => WfError::BadContext(format!("parameter {s} is not interpreted")),
            other => WfError::Sem(other),
        };
        let it = layout.interp(ctx).map_err(miss)?;
        let rels = layout.rels(ctx, |p| defined.contains(p)).map_err(miss)?;
        let cdef = Compiler::new(&layout, false).definition(d)?;
        Ok(Problem {
            layout,
            it,
            rels,
            cdef,
            ctx: ctx.clone(),
        })
    }

    /// Problem whose context is the non-defined part of `a`, plus `a`'s
    /// defined relations as `(lower, upper)`.
    pub fn from_three(d: &Definition, a: &ThreeValued) -> Result<(Problem, Vec<Relation>, Vec<Relation>), WfError> {
        let mut ctx = a.lower.clone();
        for p in d.defined() {
            ctx.relations.remove(&p);
        }
        let pb = Problem::new(d, &ctx)?;
        let lo = pb.layout.rels(&a.lower, |_| false)?;
        let up = pb.layout.rels(&a.upper, |_| false)?;
        Ok((pb, lo, up))
    }

    pub fn atom_name(&self, (k, i): Atom) -> (Name, Vec<Elem>) {
        let (s, a) = self.cdef.defined[k];
        (self.layout.preds.get_index(s).unwrap().0.clone(), decode(i, a, self.it.n))
    }

    pub fn find_atom(&self, p: &str, t: &[Elem]) -> Option<Atom> {
        let s = self.layout.pred(p)?;
        let k = self.cdef.defined.iter().position(|(x, _)| *x == s)?;
        Some((k, crate::semantics::index(t, self.it.n)))
    }

    /// Context extended with the defined relations of `lo`/`up`.
    pub fn three(&self, lo: &[Relation], up: &[Relation]) -> ThreeValued {
        let mut lower = self.ctx.clone();
        let mut upper = self.ctx.clone();
        for (s, _) in &self.cdef.defined {
            let p = self.layout.preds.get_index(*s).unwrap().0.clone();
            lower.relations.insert(p.clone(), lo[*s].clone());
            upper.relations.insert(p, up[*s].clone());
        }
        ThreeValued { lower, upper }
    }

    pub fn all_atoms(&self) -> Vec<Atom> {
        atoms(&self.cdef, self.it.n)
    }

    pub fn body(&self, a: Atom, lo: &[Relation], up: &[Relation]) -> Truth {
        body_kleene(&self.cdef, a, &self.it, lo, up, &mut Vec::new())
    }

    pub fn slot(&self, (k, _): Atom) -> usize {
        self.cdef.defined[k].0
    }
}

/// The well-founded model of `d` in `ctx` and the induction that reached it.
pub fn well_founded_model(d: &Definition, ctx: &Structure) -> Result<(ThreeValued, WfTrace), WfError> {
    let pb = Problem::new(d, ctx)?;
    let mut raw = Vec::new();
    let (lo, up) = run(&pb.cdef, &pb.it, &pb.rels, &mut Vec::new(), Some(&mut raw));
    let mut lo0 = pb.rels.clone();
    let mut up0 = pb.rels.clone();
    for (s, a) in &pb.cdef.defined {
        lo0[*s] = Relation::empty(*a, pb.it.n);
        up0[*s] = Relation::full(*a, pb.it.n);
    }
    let trace = WfTrace {
        initial: pb.three(&lo0, &up0),
        steps: raw
            .into_iter()
            .map(|(direction, atoms, l, u)| WfStep {
                direction,
                atoms: atoms.into_iter().map(|a| pb.atom_name(a)).collect(),
                state: pb.three(&l, &u),
            })
            .collect(),
    };
    Ok((pb.three(&lo, &up), trace))
}

/// Greatest unfounded set of `d` at `a`, as named atoms.
pub fn greatest_unfounded_set(d: &Definition, a: &ThreeValued) -> Result<Vec<(Name, Vec<Elem>)>, WfError> {
    let (pb, lo, up) = Problem::from_three(d, a)?;
    let u = unfounded(&pb.cdef, &pb.it, &lo, &up, &mut Vec::new());
    Ok(u.into_iter().map(|x| pb.atom_name(x)).collect())
}

/// Unknown atoms whose merged body is true at `a`.
pub fn true_candidates(d: &Definition, a: &ThreeValued) -> Result<Vec<(Name, Vec<Elem>)>, WfError> {
    let (pb, lo, up) = Problem::from_three(d, a)?;
    Ok(pb
        .all_atoms()
        .into_iter()
        .filter(|x| unknown(&pb.cdef, *x, &lo, &up) && pb.body(*x, &lo, &up) == Truth::T)
        .map(|x| pb.atom_name(x))
        .collect())
}

pub fn is_total(d: &Definition, ctx: &Structure) -> Result<bool, WfError> {
    Ok(well_founded_model(d, ctx)?.0.is_two_valued())
}

/// `I ⊨wf φ`.
pub fn satisfies_wf(s: &Structure, f: &Formula) -> Result<bool, SemError> {
    crate::semantics::satisfies(s, f, Semantics::Wf)
}

/// Apply one refinement step after checking it is legal: either all atoms
/// are unknown with true bodies, or they form an unfounded set.
pub fn refine(d: &Definition, a: &ThreeValued, dir: Direction, set: &[(Name, Vec<Elem>)]) -> Result<ThreeValued, String> {
    let (pb, lo, up) = Problem::from_three(d, a).map_err(|e| e.to_string())?;
    if set.is_empty() {
        return Err("empty refinement".into());
    }
    let mut ids = Vec::new();
    for (p, t) in set {
        let x = pb.find_atom(p, t).ok_or_else(|| format!("{} is not a defined atom", fmt_atom(p, t)))?;
        if !unknown(&pb.cdef, x, &lo, &up) {
            return Err(format!("{} is not unknown", fmt_atom(p, t)));
        }
        ids.push(x);
    }
    let (mut lo2, mut up2) = (lo.clone(), up.clone());
    match dir {
        Direction::True => {
            for x in &ids {
                if pb.body(*x, &lo, &up) != Truth::T {
                    let (p, t) = pb.atom_name(*x);
                    return Err(format!("body of {} is not true", fmt_atom(&p, &t)));
                }
                lo2[pb.slot(*x)].set(x.1, true);
            }
        }
        Direction::Unfounded => {
            for x in &ids {
                up2[pb.slot(*x)].set(x.1, false);
            }
            for x in &ids {
                if pb.body(*x, &lo2, &up2) != Truth::F {
                    let (p, t) = pb.atom_name(*x);
                    return Err(format!("body of {} is not false after refinement", fmt_atom(&p, &t)));
                }
            }
        }
    }
    Ok(pb.three(&lo2, &up2))
}

/// Independent re-check of a trace: every step is a legal refinement and the
/// final state admits none.
pub fn verify_trace(d: &Definition, ctx: &Structure, trace: &WfTrace) -> Result<(), String> {
    let pb = Problem::new(d, ctx).map_err(|e| e.to_string())?;
    let (lo0, up0) = {
        let a = &trace.initial;
        (pb.layout.rels(&a.lower, |_| false).map_err(|e| e.to_string())?, pb.layout.rels(&a.upper, |_| false).map_err(|e| e.to_string())?)
    };
    for x in pb.all_atoms() {
        if !unknown(&pb.cdef, x, &lo0, &up0) {
            return Err("initial state is not all-unknown".into());
        }
    }
    let mut cur = trace.initial.clone();
    for (i, s) in trace.steps.iter().enumerate() {
        let next = refine(d, &cur, s.direction, &s.atoms).map_err(|e| format!("step {}: {e}", i + 1))?;
        if next != s.state {
            return Err(format!("step {}: recorded state differs", i + 1));
        }
        cur = next;
    }
    let lo = pb.layout.rels(&cur.lower, |_| false).map_err(|e| e.to_string())?;
    let up = pb.layout.rels(&cur.upper, |_| false).map_err(|e| e.to_string())?;
    let unk: Vec<Atom> = pb.all_atoms().into_iter().filter(|x| unknown(&pb.cdef, *x, &lo, &up)).collect();
    if unk.iter().any(|x| pb.body(*x, &lo, &up) == Truth::T) {
        return Err("final state still has a true refinement".into());
    }
    // no nonempty unfounded set: brute force over subsets when small
    if unk.len() <= 14 {
        for mask in 1u32..(1 << unk.len()) {
            let mut up2 = up.clone();
            let chosen: Vec<Atom> = (0..unk.len()).filter(|b| mask >> b & 1 == 1).map(|b| unk[b]).collect();
            for x in &chosen {
                up2[pb.slot(*x)].set(x.1, false);
            }
            if chosen.iter().all(|x| pb.body(*x, &lo, &up2) == Truth::F) {
                return Err("final state still has an unfounded set".into());
            }
        }
    } else if !unfounded(&pb.cdef, &pb.it, &lo, &up, &mut Vec::new()).is_empty() {
        return Err("final state still has an unfounded set".into());
    }
    Ok(())
}
