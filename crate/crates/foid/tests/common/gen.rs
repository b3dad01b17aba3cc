//! Random formulas, definitions and structures over a small fixed vocabulary:
//! unary P, Q (defined in random definitions), unary R and nullary A (open),
//! constant c, unary function f.

use foid::semantics::{FuncTable, Relation, Structure, ThreeValued};
use foid::syntax::{name, Definition, Formula, Rule, Term};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRng, TestRunner};

pub const SIGNATURE: &str = "pred P/1, Q/1, R/1, A/0. fun f/1. const c.";

pub fn term(with_f: bool) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![Just(Term::obj("x")), Just(Term::obj("y")), Just(Term::obj("c"))];
    if with_f {
        leaf.prop_recursive(2, 4, 1, |t| t.prop_map(|t| Term::app("f", vec![t]))).boxed()
    } else {
        leaf.boxed()
    }
}

fn atom(with_f: bool, preds: &'static [&'static str]) -> BoxedStrategy<Formula> {
    prop_oneof![
        4 => (prop::sample::select(preds), term(with_f)).prop_map(|(p, t)| Formula::atom(p, vec![t])),
        1 => Just(Formula::atom("A", vec![])),
        1 => (term(with_f), term(with_f)).prop_map(|(a, b)| Formula::Eq(a, b)),
        1 => prop_oneof![Just(Formula::True), Just(Formula::False)],
    ]
    .boxed()
}

fn grow(leaf: BoxedStrategy<Formula>, depth: u32, iff: bool) -> BoxedStrategy<Formula> {
    leaf.prop_recursive(depth, 24, 2, move |f| {
        let var = prop_oneof![Just("x"), Just("y")];
        let bin = (f.clone(), f.clone());
        let mut arms = vec![
            f.clone().prop_map(Formula::not).boxed(),
            bin.clone().prop_map(|(a, b)| Formula::and(a, b)).boxed(),
            bin.clone().prop_map(|(a, b)| Formula::or(a, b)).boxed(),
            bin.clone().prop_map(|(a, b)| Formula::implies(a, b)).boxed(),
            (var.clone(), f.clone()).prop_map(|(x, g)| Formula::forall(x, g)).boxed(),
            (var, f).prop_map(|(x, g)| Formula::exists(x, g)).boxed(),
        ];
        if iff {
            arms.push(bin.prop_map(|(a, b)| Formula::iff(a, b)).boxed());
        }
        proptest::strategy::Union::new(arms)
    })
    .boxed()
}

/// Arbitrary first-order formulas, possibly with free x and y.
pub fn formula() -> BoxedStrategy<Formula> {
    grow(atom(true, &["P", "Q", "R"]), 4, true)
}

/// Formulas without function symbols, for evaluation in small structures.
pub fn flat_formula() -> BoxedStrategy<Formula> {
    grow(atom(false, &["P", "Q", "R"]), 3, true)
}

fn rule() -> impl Strategy<Value = Rule> {
    let body = grow(atom(false, &["P", "Q", "R"]), 2, false);
    (prop_oneof![Just("P"), Just("Q")], body).prop_map(|(h, body)| Rule {
        bound: vec![name("x"), name("y")],
        head: name(h),
        args: vec![Term::obj("x")],
        body,
    })
}

/// Definitions of P and Q with two to four rules; the first two rules
/// define P and Q, so every predicate mentioned is either open or defined.
pub fn definition() -> impl Strategy<Value = Definition> {
    prop::collection::vec(rule(), 2..=4).prop_map(|mut rs| {
        rs[0].head = name("P");
        rs[1].head = name("Q");
        Definition::new(rs).unwrap()
    })
}

/// Every context for the open symbols R, A, c with a domain of at most `max` elements.
pub fn contexts(max: usize) -> Vec<Structure> {
    let mut out = Vec::new();
    for n in 1..=max {
        for c in 0..n {
            for r in 0..1usize << n {
                for a in [false, true] {
                    let mut s = Structure::new(n);
                    s.objects.insert(name("c"), c as u32);
                    let mut rel = Relation::empty(1, n);
                    (0..n).for_each(|i| rel.set(i, r >> i & 1 == 1));
                    s.relations.insert(name("R"), rel);
                    let mut ra = Relation::empty(0, n);
                    ra.set(0, a);
                    s.relations.insert(name("A"), ra);
                    out.push(s);
                }
            }
        }
    }
    out
}

fn relation(arity: usize, n: usize) -> impl Strategy<Value = Relation> {
    let len = n.pow(arity as u32);
    prop::collection::vec(any::<bool>(), len).prop_map(move |bits| {
        let mut r = Relation::empty(arity, n);
        bits.iter().enumerate().for_each(|(i, b)| r.set(i, *b));
        r
    })
}

fn predicates(n: usize) -> impl Strategy<Value = [Relation; 4]> {
    (relation(1, n), relation(1, n), relation(1, n), relation(0, n)).prop_map(|(p, q, r, a)| [p, q, r, a])
}

/// `k` two-valued structures sharing a domain and the interpretation of
/// `c`, `f` and the free variables `x`, `y`, differing in their predicates.
pub fn structures(k: usize) -> impl Strategy<Value = Vec<Structure>> {
    (1usize..=3).prop_flat_map(move |n| {
        let frame = (prop::collection::vec(0..n as u32, 3), prop::collection::vec(0..n as u32, n));
        (frame, prop::collection::vec(predicates(n), k)).prop_map(move |((objs, fv), preds)| {
            preds
                .into_iter()
                .map(|rels| {
                    let mut s = Structure::new(n);
                    for (o, v) in ["c", "x", "y"].into_iter().zip(&objs) {
                        s.objects.insert(name(o), *v);
                    }
                    s.functions.insert(name("f"), FuncTable { arity: 1, values: fv.clone() });
                    for (k, v) in ["P", "Q", "R", "A"].into_iter().zip(rels) {
                        s.relations.insert(name(k), v);
                    }
                    s
                })
                .collect()
        })
    })
}

pub fn structure() -> impl Strategy<Value = Structure> {
    structures(1).prop_map(|mut v| v.pop().unwrap())
}

/// The least precise three-valued structure admitting every given one:
/// lower bound is the intersection, upper bound the union.
pub fn hull(ss: &[Structure]) -> ThreeValued {
    let (mut lo, mut up) = (ss[0].clone(), ss[0].clone());
    for b in &ss[1..] {
        for (k, r) in &b.relations {
            let (l, u) = (lo.relations.get_mut(k).unwrap(), up.relations.get_mut(k).unwrap());
            for i in 0..r.len() {
                l.set(i, l.get(i) && r.get(i));
                u.set(i, u.get(i) || r.get(i));
            }
        }
    }
    ThreeValued { lower: lo, upper: up }
}

/// Draws `count` values from a strategy, deterministically.
pub fn sample<S: Strategy>(s: S, count: usize, seed: u8) -> Vec<S::Value> {
    let rng = TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &[seed; 32]);
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    (0..count).map(|_| s.new_tree(&mut runner).unwrap().current()).collect()
}
