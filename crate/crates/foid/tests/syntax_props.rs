mod common;

use std::collections::{BTreeSet, HashSet};

use common::gen;
use foid::syntax::{name, Definition, Formula, Hyp, Hyps, Polarity, Rule, Term};
use proptest::prelude::*;

fn positive_body() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop_oneof![Just("P"), Just("Q")].prop_map(|p| Formula::atom(p, vec![Term::obj("x")])),
        Just(Formula::not(Formula::atom("R", vec![Term::obj("y")]))),
        Just(Formula::atom("A", vec![])),
    ];
    leaf.prop_recursive(3, 12, 2, |f| {
        prop_oneof![
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            f.prop_map(|g| Formula::exists("y", g)),
        ]
    })
}

fn positive_definition() -> impl Strategy<Value = Definition> {
    let rule = (prop_oneof![Just("P"), Just("Q")], positive_body()).prop_map(|(h, body)| Rule {
        bound: vec![name("x"), name("y")],
        head: name(h),
        args: vec![Term::obj("x")],
        body,
    });
    prop::collection::vec(rule, 1..=3).prop_map(|rs| Definition::new(rs).unwrap())
}

fn identity_hyps(d: &Definition) -> Hyps {
    d.defined()
        .into_iter()
        .map(|q| (q.clone(), Hyp { vars: vec![name("z")], formula: Formula::atom(&q, vec![Term::obj("z")]) }))
        .collect()
}

proptest! {
    #[test]
    fn substituting_an_absent_variable_is_identity(f in gen::formula(), t in gen::term(true)) {
        prop_assume!(!f.has_free("w"));
        prop_assert_eq!(f.substitute(&t, &name("w")), f);
    }

    #[test]
    fn renaming_to_a_fresh_variable_and_back(f in gen::formula()) {
        let mut used = HashSet::new();
        f.names(&mut used);
        prop_assume!(!used.contains("w"));
        let there = f.substitute(&Term::obj("w"), &name("x"));
        prop_assert_eq!(there.substitute(&Term::obj("x"), &name("w")), f);
    }

    #[test]
    fn replace_positive_trivial_maps(f in gen::formula()) {
        prop_assert_eq!(f.replace_positive(&Hyps::new()).unwrap(), f.clone());
        let hyps: Hyps = ["P", "Q"]
            .into_iter()
            .map(|q| (name(q), Hyp { vars: vec![name("z")], formula: Formula::atom(q, vec![Term::obj("z")]) }))
            .collect();
        if let Ok(g) = f.replace_positive(&hyps) {
            prop_assert_eq!(g, f);
        }
    }

    #[test]
    fn merged_body_mentions_only_its_tuple_and_parameters(d in gen::definition()) {
        let params = d.free_objects();
        for p in d.defined() {
            let ys = d.fresh_tuple(1, &mut HashSet::new());
            let body = d.merged_body(&p, &ys).unwrap();
            let allowed: BTreeSet<_> = ys.iter().cloned().chain(params.iter().cloned()).collect();
            prop_assert!(body.free_objects().is_subset(&allowed), "{}", body);
        }
    }

    #[test]
    fn stratification_levels_respect_every_edge(d in gen::definition()) {
        let Some(level) = d.stratify() else { return Ok(()) };
        for r in d.rules() {
            for q in d.defined() {
                match r.body.polarity_of(&q) {
                    None => {}
                    Some(Polarity::Positive) => prop_assert!(level[&r.head] >= level[&q]),
                    Some(_) => prop_assert!(level[&r.head] > level[&q]),
                }
            }
        }
    }

    #[test]
    fn strata_partition_the_rules(d in gen::definition()) {
        let Ok(parts) = d.decompose_stratified() else {
            prop_assert!(d.stratify().is_none());
            return Ok(());
        };
        let mut all: Vec<Rule> = parts.iter().flat_map(|p| p.rules().to_vec()).collect();
        let mut orig = d.rules().to_vec();
        all.sort();
        orig.sort();
        prop_assert_eq!(all, orig);
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                prop_assert!(a.defined().iter().all(|p| !b.defines(p)));
            }
        }
    }

    #[test]
    fn positive_definitions_have_positive_bodies(d in positive_definition()) {
        for r in d.rules() {
            for q in d.defined() {
                let pol = r.body.polarity_of(&q);
                prop_assert!(pol.is_none() || pol == Some(Polarity::Positive));
            }
        }
        prop_assert!(d.stratify().is_some());
    }

    #[test]
    fn identity_hypotheses_leave_rule_bodies_unchanged(d in positive_definition()) {
        let hyps = identity_hyps(&d);
        for r in d.rules() {
            prop_assert_eq!(r.body.replace_positive(&hyps).unwrap(), r.body.clone());
        }
    }

    #[test]
    fn normal_form_has_one_rule_per_predicate(d in gen::definition()) {
        let n = d.normalize();
        prop_assert_eq!(n.rules().len(), d.defined().len());
        prop_assert_eq!(n.defined().into_iter().collect::<BTreeSet<_>>(), d.defined().into_iter().collect());
        prop_assert_eq!(n.normalize().rules().len(), n.rules().len());
    }
}
