mod support;

use std::collections::BTreeSet;

use ckab::dsl::{parse_spec, CkabSpec};
use ckab::engine::{action_step, do_action, ServiceCall, ServiceCallMap};
use ckab::kb::{ABox, Fact, Substitution, TBox};
use proptest::prelude::*;
use rand::Rng;

const CONSTANTS: [&str; 6] = ["o1", "o2", "ann", "wes", "w1", "t5"];

fn retail() -> CkabSpec {
    let text = std::fs::read_to_string(support::specs_dir().join("retail.ckab")).unwrap();
    parse_spec(&text).unwrap().value
}

fn random_abox(rng: &mut impl Rng) -> ABox {
    let pick = |rng: &mut dyn rand::RngCore| CONSTANTS[rng.random_range(0..CONSTANTS.len())];
    let mut abox = ABox::new();
    for _ in 0..rng.random_range(0..12) {
        let f = match rng.random_range(0..9) {
            0 => Fact::concept("CustOrder", pick(rng)),
            1 => Fact::concept("Assembled", pick(rng)),
            2 => Fact::concept("Wrapped", pick(rng)),
            3 => Fact::concept("Checked", pick(rng)),
            4 => Fact::concept("Assembler", pick(rng)),
            5 => Fact::concept("RemWH", pick(rng)),
            6 => Fact::role("hasTTD", pick(rng), pick(rng)),
            7 => Fact::role("assembledBy", pick(rng), pick(rng)),
            _ => Fact::concept("Wrapper", pick(rng)),
        };
        abox.insert(f);
    }
    abox
}

fn tbox(spec: &CkabSpec, rng: &mut impl Rng) -> TBox {
    let season = ["PS", "NS", "LS"][rng.random_range(0..3)];
    let plan = ["N", "WE", "ME"][rng.random_range(0..3)];
    let ctx = spec.schema.context([("S", season), ("PP", plan)]).unwrap();
    spec.ctbox.in_context(&spec.schema, &ctx).unwrap()
}

fn sigma(rng: &mut impl Rng, params: &[String]) -> Substitution {
    params
        .iter()
        .map(|p| {
            (
                p.clone(),
                CONSTANTS[rng.random_range(0..CONSTANTS.len())].to_string(),
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(support::proptest_config(200))]

    #[test]
    fn successors_are_ground_and_extend_the_map(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let spec = retail();
        let t = tbox(&spec, &mut rng);
        let abox = random_abox(&mut rng);
        let action = &spec.actions[rng.random_range(0..spec.actions.len())];
        let s = sigma(&mut rng, &action.params);
        let domain: Vec<String> = ["t5", "t7", "#1"].iter().map(|c| c.to_string()).collect();
        let mut prior = ServiceCallMap::new();
        if rng.random_bool(0.5) {
            prior.insert(ServiceCall::with_constants("newTTD", vec!["w1", "t5"]), "t7");
        }
        let allowed: BTreeSet<String> = abox
            .adom()
            .into_iter()
            .chain(domain.iter().cloned())
            .chain(s.values().cloned())
            .chain(spec.constants.iter().cloned())
            .collect();
        for (next, m) in action_step(&t, &abox, &prior, action, &s, &domain) {
            prop_assert!(prior.is_subset_of(&m));
            for c in next.adom() {
                prop_assert!(allowed.contains(&c), "{}", c);
            }
        }
        let single = action_step(&t, &abox, &ServiceCallMap::new(), action, &s, &domain[..1]);
        prop_assert_eq!(single.len(), 1);
    }

    #[test]
    fn effects_are_monotone_in_the_data(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let spec = retail();
        let t = tbox(&spec, &mut rng);
        let abox = random_abox(&mut rng);
        let mut bigger = abox.clone();
        for f in random_abox(&mut rng).iter() {
            bigger.insert(f.clone());
        }
        // retail effects have no negative part
        for action in &spec.actions {
            prop_assert!(action.effects.iter().all(|e| e.qminus.is_none()));
            let s = sigma(&mut rng, &action.params);
            let small = do_action(&t, &abox, action, &s);
            let large = do_action(&t, &bigger, action, &s);
            prop_assert!(small.0.is_subset(&large.0), "{}", action.name);
        }
    }
}
