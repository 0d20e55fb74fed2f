mod support;

use std::collections::BTreeSet;

use ckab::dsl::parse_spec;
use ckab::statespace::{build, BuildConfig, DependencyGraph, Position};
use proptest::prelude::*;
use rand::Rng;

/// Whether some simple cycle uses a special edge, by enumerating every
/// simple path.
fn exhaustive_special_cycle(n: usize, edges: &BTreeSet<(usize, usize, bool)>) -> bool {
    fn walk(
        start: usize,
        at: usize,
        special_seen: bool,
        on_path: &mut Vec<bool>,
        edges: &BTreeSet<(usize, usize, bool)>,
    ) -> bool {
        for &(a, b, special) in edges {
            if a != at {
                continue;
            }
            let seen = special_seen || special;
            if b == start {
                if seen {
                    return true;
                }
                continue;
            }
            if !on_path[b] {
                on_path[b] = true;
                let found = walk(start, b, seen, on_path, edges);
                on_path[b] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    (0..n).any(|s| {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        walk(s, s, false, &mut on_path, edges)
    })
}

fn pos(i: usize) -> Position {
    Position::new(format!("P{}", i / 2), i % 2 + 1)
}

proptest! {
    #![proptest_config(support::proptest_config(300))]

    #[test]
    fn special_cycles_match_exhaustive_search(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let n = rng.random_range(1..=12);
        let mut edges = BTreeSet::new();
        let mut g = DependencyGraph::new();
        for i in 0..n {
            g.add_node(pos(i));
        }
        for a in 0..n {
            for b in 0..n {
                if rng.random_bool(0.15) {
                    let special = rng.random_bool(0.3);
                    edges.insert((a, b, special));
                    g.add_edge(pos(a), pos(b), special);
                }
            }
        }
        let expected = exhaustive_special_cycle(n, &edges);
        let cycle = g.special_cycle();
        prop_assert_eq!(cycle.is_some(), expected);
        if let Some(c) = cycle {
            // consecutive positions are joined by edges and the first is special
            prop_assert!(g.special_edges().contains(&(c[0].clone(), c[1].clone())));
            prop_assert_eq!(c.first(), c.last());
            for w in c.windows(2) {
                let e = (w[0].clone(), w[1].clone());
                prop_assert!(g.normal_edges().contains(&e) || g.special_edges().contains(&e));
            }
        }
    }
}

#[test]
fn builds_agree_across_threads_and_keep_invariants() {
    for name in ["retail.ckab", "retail_stuck.ckab", "retail_nocalls.ckab"] {
        let text = std::fs::read_to_string(support::specs_dir().join(name)).unwrap();
        let spec = parse_spec(&text).unwrap().value;
        let reference = build(
            &spec,
            &BuildConfig {
                threads: Some(1),
                ..BuildConfig::default()
            },
        )
        .unwrap();
        for threads in [2, 3, 4] {
            let ts = build(
                &spec,
                &BuildConfig {
                    threads: Some(threads),
                    ..BuildConfig::default()
                },
            )
            .unwrap();
            assert_eq!(
                ts.to_json(),
                reference.to_json(),
                "{name} with {threads} threads"
            );
        }
        let ts = reference;
        for (a, b) in ts.edges() {
            assert_ne!(ts.state(a).phase, ts.state(b).phase);
            assert!(ts.state(a).scmap.is_subset_of(&ts.state(b).scmap));
        }
        for s in ts.states().iter().filter(|s| s.is_stable()) {
            let t = spec.ctbox.in_context(&spec.schema, &s.ctx).unwrap();
            assert!(ckab::kb::is_consistent(&t, &s.abox), "{name} s{}", s.id);
        }
        let contents: BTreeSet<_> = ts
            .states()
            .iter()
            .map(|s| (s.phase, s.ctx.clone(), s.abox.clone(), s.scmap.clone()))
            .collect();
        assert_eq!(contents.len(), ts.len());
    }
}
