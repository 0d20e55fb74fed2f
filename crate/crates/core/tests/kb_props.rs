mod support;

use ckab::kb::{certain_answers_ucq, is_consistent, rewrite_ucq, ABox};
use proptest::prelude::*;
use support::chase::{chase, chase_answers, consistent, random_kb, random_ucq, Kb};

const CHASE_CAP: usize = 1000;

/// A random knowledge base whose chase terminates. Draws until one does.
fn terminating_kb(rng: &mut impl rand::Rng) -> (Kb, support::chase::Model) {
    loop {
        let kb = random_kb(rng);
        if let Some(m) = chase(&kb, CHASE_CAP) {
            return (kb, m);
        }
    }
}

proptest! {
    #![proptest_config(support::proptest_config(200))]

    #[test]
    fn certain_answers_match_the_chase(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let (kb, model) = terminating_kb(&mut rng);
        prop_assert_eq!(is_consistent(&kb.tbox, &kb.abox), consistent(&kb, &model));
        if consistent(&kb, &model) {
            let q = random_ucq(&mut rng);
            let ans = certain_answers_ucq(&q, &kb.tbox, &kb.abox);
            prop_assert_eq!(ans.tuples, chase_answers(&model, &q), "query {:?}", q);
        }
    }

    #[test]
    fn rewriting_is_monotone_in_the_abox(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let kb = random_kb(&mut rng);
        let q = random_ucq(&mut rng);
        let rewritten = rewrite_ucq(&q, &kb.tbox);
        let extra = random_kb(&mut rng).abox;
        let mut bigger = kb.abox.clone();
        for f in extra.iter() {
            bigger.insert(f.clone());
        }
        let small = rewritten.evaluate(&kb.abox);
        let large = rewritten.evaluate(&bigger);
        prop_assert!(small.tuples.is_subset(&large.tuples));
    }

    #[test]
    fn adding_facts_never_repairs_inconsistency(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let kb = random_kb(&mut rng);
        if !is_consistent(&kb.tbox, &kb.abox) {
            let mut bigger: ABox = kb.abox.clone();
            for f in random_kb(&mut rng).abox.iter() {
                bigger.insert(f.clone());
            }
            prop_assert!(!is_consistent(&kb.tbox, &bigger));
        }
    }

    #[test]
    fn answers_stay_in_the_active_domain(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let kb = random_kb(&mut rng);
        let q = random_ucq(&mut rng);
        let adom = kb.abox.adom();
        let ans = certain_answers_ucq(&q, &kb.tbox, &kb.abox);
        let mut allowed = adom.clone();
        for cq in q.disjuncts() {
            allowed.extend(cq.constants().into_iter().map(str::to_string));
        }
        for t in &ans.tuples {
            for c in t {
                prop_assert!(allowed.contains(c), "{}", c);
            }
        }
    }
}

#[test]
fn more_specific_contexts_keep_positive_guards() {
    let text = std::fs::read_to_string(support::specs_dir().join("retail.ckab")).unwrap();
    let spec = ckab::dsl::parse_spec(&text).unwrap().value;
    let pp = spec.schema.dimension("PP").unwrap();
    let s = spec.schema.dimension("S").unwrap();
    let mut contexts = Vec::new();
    for a in pp.values() {
        for b in s.values() {
            contexts.push(
                spec.schema
                    .context([("PP", a.as_str()), ("S", b.as_str())])
                    .unwrap(),
            );
        }
    }
    for c1 in &contexts {
        let t1 = spec.ctbox.in_context(&spec.schema, c1).unwrap();
        for c2 in &contexts {
            let finer = spec.schema.dimensions().iter().all(|d| {
                d.is_ancestor_or_self(c1.get(d.name()).unwrap(), c2.get(d.name()).unwrap())
            });
            if finer {
                let t2 = spec.ctbox.in_context(&spec.schema, c2).unwrap();
                for a in t1.assertions() {
                    assert!(t2.assertions().contains(a), "{a} lost from {c1} to {c2}");
                }
            }
        }
    }
}
