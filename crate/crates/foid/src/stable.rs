//! The operator `C`, the stable operator `ST = lfp C(·, J)`, stable models
//! and the oscillating pair `(lfp ST², gfp ST²)`.

use rayon::prelude::*;
use thiserror::Error;

use crate::semantics::{decode, CDef, Elem, Interp, Relation, SemError, Semantics, Structure, ThreeValued};
use crate::syntax::{Definition, Formula};
use crate::wf::{Problem, WfError};

pub const DEFAULT_CAP: usize = 20;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StableError {
    #[error("structure space has {atoms} atoms, above the cap of {cap}")]
    SpaceTooLarge { atoms: usize, cap: usize },
    #[error("structures do not expand the same context")]
    SpaceMismatch,
    #[error(transparent)]
    Wf(#[from] WfError),
}

/// `C(I, J)` on the defined slots of `i`.
pub(crate) fn apply_c(d: &CDef, it: &Interp, i: &[Relation], j: &[Relation], env: &mut Vec<Elem>) -> Vec<Relation> {
    let mut out = i.to_vec();
    for (k, (s, a)) in d.defined.iter().enumerate() {
        let mut r = Relation::empty(*a, it.n);
        for idx in 0..r.len() {
            let base = env.len();
            env.extend(decode(idx, *a, it.n));
            if d.bodies[k].pair(it, i, j, env) {
                r.set(idx, true);
            }
            env.truncate(base);
        }
        out[*s] = r;
    }
    out
}

/// `ST(J)`: iterate `C(·, J)` from the bottom element. `C(·, J)` is
/// monotone, so atoms are updated in place; the limit is the same.
pub(crate) fn stable_fixpoint(d: &CDef, it: &Interp, j: &[Relation], env: &mut Vec<Elem>) -> Vec<Relation> {
    let mut k = j.to_vec();
    for (s, a) in &d.defined {
        k[*s] = Relation::empty(*a, it.n);
    }
    loop {
        let mut changed = false;
        for (b, (s, a)) in d.defined.iter().enumerate() {
            for idx in 0..k[*s].len() {
                if k[*s].get(idx) {
                    continue;
                }
                let base = env.len();
                env.extend(decode(idx, *a, it.n));
                let v = d.bodies[b].pair(it, &k, j, env);
                env.truncate(base);
                if v {
                    k[*s].set(idx, true);
                    changed = true;
                }
            }
        }
        if !changed {
            return k;
        }
    }
}

fn same_defined(d: &CDef, a: &[Relation], b: &[Relation]) -> bool {
    d.defined.iter().all(|(s, _)| a[*s] == b[*s])
}

/// `(lfp ST², gfp ST²)` on compiled input.
pub(crate) fn oscillation(d: &CDef, it: &Interp, rels: &[Relation], env: &mut Vec<Elem>) -> (Vec<Relation>, Vec<Relation>) {
    let mut lo = rels.to_vec();
    let mut up = rels.to_vec();
    for (s, a) in &d.defined {
        lo[*s] = Relation::empty(*a, it.n);
        up[*s] = Relation::full(*a, it.n);
    }
    let st2 = |x: &[Relation], env: &mut Vec<Elem>| {
        let y = stable_fixpoint(d, it, x, env);
        stable_fixpoint(d, it, &y, env)
    };
    loop {
        let next = st2(&lo, env);
        if same_defined(d, &next, &lo) {
            break;
        }
        lo = next;
    }
    loop {
        let next = st2(&up, env);
        if same_defined(d, &next, &up) {
            break;
        }
        up = next;
    }
    (lo, up)
}

fn problem_pair(d: &Definition, i: &Structure, j: &Structure) -> Result<(Problem, Vec<Relation>, Vec<Relation>), StableError> {
    if !i.same_frame(j) || !i.relations.keys().eq(j.relations.keys()) {
        return Err(StableError::SpaceMismatch);
    }
    let mut ctx = i.clone();
    for p in d.defined() {
        if ctx.relations.remove(&p).is_none() {
            return Err(StableError::SpaceMismatch);
        }
    }
    let pb = Problem::new(d, &ctx)?;
    let ri = pb.layout.rels(i, |_| false).map_err(WfError::from)?;
    let rj = pb.layout.rels(j, |_| false).map_err(WfError::from)?;
    Ok((pb, ri, rj))
}

fn with_defined(pb: &Problem, rels: &[Relation]) -> Structure {
    let mut s = pb.ctx.clone();
    for (slot, _) in &pb.cdef.defined {
        let p = pb.layout.preds.get_index(*slot).unwrap().0.clone();
        s.relations.insert(p, rels[*slot].clone());
    }
    s
}

/// `C(I, J)`.
pub fn apply_c_structures(d: &Definition, i: &Structure, j: &Structure) -> Result<Structure, StableError> {
    let (pb, ri, rj) = problem_pair(d, i, j)?;
    Ok(with_defined(&pb, &apply_c(&pb.cdef, &pb.it, &ri, &rj, &mut Vec::new())))
}

/// `ST(I)`.
pub fn stable_op(d: &Definition, i: &Structure) -> Result<Structure, StableError> {
    let (pb, ri, _) = problem_pair(d, i, i)?;
    Ok(with_defined(&pb, &stable_fixpoint(&pb.cdef, &pb.it, &ri, &mut Vec::new())))
}

fn defined_atoms(pb: &Problem) -> usize {
    pb.cdef.defined.iter().map(|(_, a)| pb.it.n.pow(*a as u32)).sum()
}

/// All stable models by exhaustive enumeration of the structure space.
pub fn stable_models_naive(d: &Definition, ctx: &Structure, cap: usize) -> Result<Vec<Structure>, StableError> {
    let pb = Problem::new(d, ctx)?;
    let atoms = defined_atoms(&pb);
    if atoms > cap {
        return Err(StableError::SpaceTooLarge { atoms, cap });
    }
    let slots: Vec<(usize, usize)> = pb
        .cdef
        .defined
        .iter()
        .flat_map(|(s, a)| (0..pb.it.n.pow(*a as u32)).map(move |i| (*s, i)))
        .collect();
    let mut found: Vec<Structure> = (0u64..1 << atoms)
        .into_par_iter()
        .filter_map(|mask| {
            let mut cand = pb.rels.clone();
            for (s, a) in &pb.cdef.defined {
                cand[*s] = Relation::empty(*a, pb.it.n);
            }
            for (b, (s, i)) in slots.iter().enumerate() {
                cand[*s].set(*i, mask >> b & 1 == 1);
            }
            let st = stable_fixpoint(&pb.cdef, &pb.it, &cand, &mut Vec::new());
            same_defined(&pb.cdef, &st, &cand).then(|| with_defined(&pb, &cand))
        })
        .collect();
    found.sort();
    Ok(found)
}

/// Stable models within the well-founded bounds. Every stable model lies
/// between `lfp ST²` and `gfp ST²`, so only atoms unknown there are
/// enumerated; `cap` bounds their number.
pub(crate) fn stable_models_compiled(
    d: &CDef,
    it: &Interp,
    rels: &[Relation],
    env: &mut Vec<Elem>,
    cap: usize,
) -> Result<Vec<Vec<Relation>>, StableError> {
    let (lo, up) = crate::wf::fixpoint(d, it, rels, env);
    let mut free = Vec::new();
    for (s, _) in &d.defined {
        for i in 0..lo[*s].len() {
            if !lo[*s].get(i) && up[*s].get(i) {
                free.push((*s, i));
            }
        }
    }
    if free.len() > cap {
        return Err(StableError::SpaceTooLarge { atoms: free.len(), cap });
    }
    // a two-valued well-founded model is the only stable model
    if free.is_empty() {
        return Ok(vec![lo]);
    }
    let mut out = Vec::new();
    // the well-founded pair already satisfies lo = ST(up) and up = ST(lo)
    let b = Bounds { below: Some(lo.clone()), above: Some(up.clone()), lo, up };
    branch(d, it, b, env, &mut out);
    Ok(out)
}

/// Stable models `M` with `lo ⊆ M ⊆ up`. Since `ST` is antitone, any such
/// `M` satisfies `ST(up) ⊆ M ⊆ ST(lo)`; the bounds are tightened with that
/// before splitting on an open atom. `below` and `above` carry `ST(up)` and
/// `ST(lo)` when already known.
struct Bounds {
    lo: Vec<Relation>,
    up: Vec<Relation>,
    below: Option<Vec<Relation>>,
    above: Option<Vec<Relation>>,
}

fn branch(d: &CDef, it: &Interp, mut b: Bounds, env: &mut Vec<Elem>, out: &mut Vec<Vec<Relation>>) {
    let (mut below, mut above) = loop {
        let below = b.below.take().unwrap_or_else(|| stable_fixpoint(d, it, &b.up, env));
        let above = b.above.take().unwrap_or_else(|| stable_fixpoint(d, it, &b.lo, env));
        let (mut lo_moved, mut up_moved) = (false, false);
        for (s, _) in &d.defined {
            for i in 0..b.lo[*s].len() {
                let (l0, u0) = (b.lo[*s].get(i), b.up[*s].get(i));
                let (l, u) = (l0 || below[*s].get(i), u0 && above[*s].get(i));
                if l && !u {
                    return;
                }
                lo_moved |= l != l0;
                up_moved |= u != u0;
                b.lo[*s].set(i, l);
                b.up[*s].set(i, u);
            }
        }
        if !lo_moved && !up_moved {
            break (below, above);
        }
        b.below = (!up_moved).then_some(below);
        b.above = (!lo_moved).then_some(above);
    };
    let open = d.defined.iter().find_map(|(s, _)| (0..b.lo[*s].len()).find(|&i| !b.lo[*s].get(i) && b.up[*s].get(i)).map(|i| (*s, i)));
    match open {
        // lo = up here, and the tightening step made it a fixpoint of ST
        None => out.push(b.lo),
        Some((s, i)) => {
            let mut lo = b.lo.clone();
            lo[s].set(i, true);
            let shared = b.up.clone();
            branch(d, it, Bounds { lo, up: shared, below: Some(std::mem::take(&mut below)), above: None }, env, out);
            let mut up = b.up;
            up[s].set(i, false);
            branch(d, it, Bounds { lo: b.lo, up, below: None, above: Some(std::mem::take(&mut above)) }, env, out);
        }
    }
}

/// All stable models of `d` in `ctx`, sorted.
pub fn stable_models(d: &Definition, ctx: &Structure, cap: usize) -> Result<Vec<Structure>, StableError> {
    let pb = Problem::new(d, ctx)?;
    let models = stable_models_compiled(&pb.cdef, &pb.it, &pb.rels, &mut Vec::new(), cap)?;
    let mut out: Vec<Structure> = models.iter().map(|m| with_defined(&pb, m)).collect();
    out.sort();
    Ok(out)
}

/// `I ⊨st φ`.
pub fn satisfies_st(s: &Structure, f: &Formula) -> Result<bool, SemError> {
    crate::semantics::satisfies(s, f, Semantics::Stable)
}

/// The well-founded model as the maximal oscillating pair of `ST`.
pub fn wf_via_oscillation(d: &Definition, ctx: &Structure) -> Result<ThreeValued, StableError> {
    let pb = Problem::new(d, ctx)?;
    let (lo, up) = oscillation(&pb.cdef, &pb.it, &pb.rels, &mut Vec::new());
    Ok(pb.three(&lo, &up))
}
