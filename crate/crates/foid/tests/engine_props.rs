mod common;

use std::collections::BTreeSet;

use common::gen;
use foid::kernel::indscheme_instance;
use foid::semantics::{eval_two, Relation, Structure, ThreeValued};
use foid::stable::{apply_c_structures, stable_models, stable_models_naive, stable_op, wf_via_oscillation};
use foid::syntax::{name, Definition, Formula, Hyp, Hyps, Name, Term};
use foid::wf::{greatest_unfounded_set, refine, true_candidates, verify_trace, well_founded_model, Direction};
use proptest::prelude::*;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = 20;

fn context() -> impl Strategy<Value = Structure> {
    prop::sample::select(gen::contexts(2))
}

/// Adds random interpretations of the defined predicates.
fn with_defined(ctx: &Structure, d: &Definition, rng: &mut ChaCha8Rng) -> Structure {
    let mut s = ctx.clone();
    for p in d.defined() {
        let mut r = Relation::empty(1, s.size);
        (0..s.size).for_each(|i| r.set(i, rng.gen()));
        s.relations.insert(p, r);
    }
    s
}

fn leq(a: &Structure, b: &Structure, d: &Definition) -> bool {
    d.defined().iter().all(|p| a.relations[p].is_subset(&b.relations[p]))
}

fn meet(a: &Structure, b: &Structure) -> Structure {
    gen::hull(&[a.clone(), b.clone()]).lower
}

/// Runs refinements in a random order and granularity until none applies.
fn random_schedule(d: &Definition, ctx: &Structure, rng: &mut ChaCha8Rng) -> ThreeValued {
    let mut a = well_founded_model(d, ctx).unwrap().1.initial;
    loop {
        let trues = true_candidates(d, &a).unwrap();
        let gus = greatest_unfounded_set(d, &a).unwrap();
        if trues.is_empty() && gus.is_empty() {
            return a;
        }
        let go_true = !trues.is_empty() && (gus.is_empty() || rng.gen_bool(0.5));
        a = if go_true {
            let k = rng.gen_range(1..=trues.len());
            let pick: Vec<_> = trues.choose_multiple(rng, k).cloned().collect();
            refine(d, &a, Direction::True, &pick).unwrap()
        } else {
            let k = rng.gen_range(1..=gus.len());
            let pick: Vec<_> = gus.choose_multiple(rng, k).cloned().collect();
            refine(d, &a, Direction::Unfounded, &pick).or_else(|_| refine(d, &a, Direction::Unfounded, &gus)).unwrap()
        };
    }
}

fn completion(d: &Definition) -> Vec<Formula> {
    d.defined()
        .into_iter()
        .map(|p| {
            let body = d.merged_body(&p, &[name("v")]).unwrap();
            Formula::forall("v", Formula::iff(Formula::atom(&p, vec![Term::obj("v")]), body))
        })
        .collect()
}

/// Every induction instance for every `Π ∋ P` and every choice of unary
/// relations for the hypotheses `G_Q`, which must all hold in `s`.
fn induction_instances_hold(d: &Definition, s: &Structure) -> Result<(), String> {
    let defined = d.defined();
    for mask in 1..1u32 << defined.len() {
        let pi: Vec<&Name> = defined.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).collect();
        let hyps: Hyps = pi
            .iter()
            .map(|q| ((*q).clone(), Hyp { vars: vec![name("z")], formula: Formula::atom(&format!("G{q}"), vec![Term::obj("z")]) }))
            .collect();
        let n = s.size;
        for bits in 0..1usize << (n * pi.len()) {
            let mut t = s.clone();
            for (k, q) in pi.iter().enumerate() {
                let mut r = Relation::empty(1, n);
                (0..n).for_each(|i| r.set(i, bits >> (k * n + i) & 1 == 1));
                t.relations.insert(name(&format!("G{q}")), r);
            }
            for p in &pi {
                let Ok(f) = indscheme_instance(d, p, &hyps) else { continue };
                if !eval_two(&t, &f).unwrap() {
                    return Err(format!("{f} fails"));
                }
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn oscillation_yields_the_well_founded_model(d in gen::definition(), ctx in context()) {
        let wf = well_founded_model(&d, &ctx).unwrap().0;
        prop_assert_eq!(wf_via_oscillation(&d, &ctx).unwrap(), wf);
    }

    #[test]
    fn traces_verify(d in gen::definition(), ctx in context()) {
        let (_, trace) = well_founded_model(&d, &ctx).unwrap();
        prop_assert_eq!(verify_trace(&d, &ctx, &trace), Ok(()));
    }

    #[test]
    fn random_schedules_are_confluent(d in gen::definition(), ctx in context(), seed in any::<u64>()) {
        let wf = well_founded_model(&d, &ctx).unwrap().0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..3 {
            prop_assert_eq!(&random_schedule(&d, &ctx, &mut rng), &wf);
        }
    }

    #[test]
    fn total_models_satisfy_completion_and_induction(d in gen::definition(), ctx in context()) {
        let wf = well_founded_model(&d, &ctx).unwrap().0;
        if wf.is_two_valued() {
            for f in completion(&d) {
                prop_assert!(eval_two(&wf.lower, &f).unwrap(), "{}", f);
            }
            prop_assert_eq!(induction_instances_hold(&d, &wf.lower), Ok(()));
            prop_assert_eq!(stable_models(&d, &ctx, CAP).unwrap(), vec![wf.lower]);
        }
    }

    #[test]
    fn stable_models_satisfy_completion_and_induction(d in gen::definition(), ctx in context()) {
        for m in stable_models(&d, &ctx, CAP).unwrap() {
            for f in completion(&d) {
                prop_assert!(eval_two(&m, &f).unwrap(), "{}", f);
            }
            prop_assert_eq!(induction_instances_hold(&d, &m), Ok(()));
        }
    }

    #[test]
    fn stable_models_lie_between_the_well_founded_bounds(d in gen::definition(), ctx in context()) {
        let wf = well_founded_model(&d, &ctx).unwrap().0;
        for m in stable_models(&d, &ctx, CAP).unwrap() {
            prop_assert!(leq(&wf.lower, &m, &d) && leq(&m, &wf.upper, &d));
        }
    }

    #[test]
    fn c_is_monotone_in_its_first_argument(d in gen::definition(), ctx in context(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, j) = (with_defined(&ctx, &d, &mut rng), with_defined(&ctx, &d, &mut rng), with_defined(&ctx, &d, &mut rng));
        let small = meet(&a, &b);
        let (lo, hi) = (apply_c_structures(&d, &small, &j).unwrap(), apply_c_structures(&d, &a, &j).unwrap());
        prop_assert!(leq(&lo, &hi, &d));
    }

    #[test]
    fn stable_operator_is_antitone(d in gen::definition(), ctx in context(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (with_defined(&ctx, &d, &mut rng), with_defined(&ctx, &d, &mut rng));
        let small = meet(&a, &b);
        prop_assert!(leq(&stable_op(&d, &a).unwrap(), &stable_op(&d, &small).unwrap(), &d));
    }

    #[test]
    fn stable_search_matches_plain_enumeration(d in gen::definition(), ctx in context()) {
        prop_assert_eq!(stable_models(&d, &ctx, CAP).unwrap(), stable_models_naive(&d, &ctx, CAP).unwrap());
    }

    #[test]
    fn stable_models_are_fixpoints(d in gen::definition(), ctx in context()) {
        let models = stable_models(&d, &ctx, CAP).unwrap();
        let distinct: BTreeSet<_> = models.iter().collect();
        prop_assert_eq!(distinct.len(), models.len());
        for m in &models {
            prop_assert_eq!(&stable_op(&d, m).unwrap(), m);
        }
    }
}
