//! Random alternating transition systems over a fixed small vocabulary, and
//! random closed μL_C formulas over it.

use ckab::checker::{MuFormula, StepPair};
use ckab::context::ContextAtom;
use ckab::dsl::parse_spec;
use ckab::kb::{Atom, Cq, Fact, Term, Ucq};
use ckab::statespace::{Phase, StateSpec, TransitionSystem};
use rand::Rng;

const SPEC: &str = "
dimensions { M: Any(On, Off) }
concepts { P, Q, Tag }
roles { R }
tbox { P [= Q @ M:On }
abox { P(a) }
init-context { M:On }
actions { }
context-rules { true |-> {} }
";

const FACTS: [(&str, &[&str]); 6] = [
    ("P", &["a"]),
    ("P", &["b"]),
    ("Q", &["a"]),
    ("Q", &["b"]),
    ("R", &["a", "b"]),
    ("R", &["b", "a"]),
];

pub fn random_ts(rng: &mut impl Rng, max_states: usize) -> TransitionSystem {
    let spec = parse_spec(SPEC).unwrap().value;
    let n = rng.random_range(1..=max_states);
    let on = spec.schema.context([("M", "On")]).unwrap();
    let off = spec.schema.context([("M", "Off")]).unwrap();
    let mut states = Vec::with_capacity(n);
    for i in 0..n {
        let stable = i == 0 || rng.random_bool(0.5);
        let mut abox: Vec<Fact> = FACTS
            .iter()
            .filter(|_| rng.random_bool(0.4))
            .map(|(p, args)| Atom::new(*p, args.iter().map(|a| a.to_string()).collect()))
            .collect();
        // keeps contents distinct
        abox.push(Fact::concept("Tag", format!("t{i}")));
        if !stable {
            abox.push(Fact::marker());
        }
        states.push(StateSpec {
            phase: if stable {
                Phase::Stable
            } else {
                Phase::Intermediate
            },
            ctx: if rng.random_bool(0.5) {
                on.clone()
            } else {
                off.clone()
            },
            abox: abox.into_iter().collect(),
            scmap: Default::default(),
        });
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if states[a].phase != states[b].phase && rng.random_bool(0.35) {
                edges.push((a, b));
            }
        }
    }
    TransitionSystem::new(spec.schema, spec.ctbox, states, 0, edges).unwrap()
}

/// Replaces the data of every intermediate state, keeping its marker, phase
/// and context.
pub fn scramble_intermediates(rng: &mut impl Rng, ts: &TransitionSystem) -> TransitionSystem {
    let states = ts
        .states()
        .iter()
        .map(|s| {
            let mut abox = s.abox.clone();
            if !s.is_stable() {
                abox = FACTS
                    .iter()
                    .filter(|_| rng.random_bool(0.5))
                    .map(|(p, args)| Atom::new(*p, args.iter().map(|a| a.to_string()).collect()))
                    .chain([Fact::concept("Tag", format!("u{}", s.id)), Fact::marker()])
                    .collect();
            }
            StateSpec {
                phase: s.phase,
                ctx: s.ctx.clone(),
                abox,
                scmap: s.scmap.clone(),
            }
        })
        .collect();
    TransitionSystem::new(
        ts.schema().clone(),
        ts.ctbox().clone(),
        states,
        ts.initial(),
        ts.edges().collect::<Vec<_>>(),
    )
    .unwrap()
}

struct Gen {
    /// Bound fixpoint variables with the polarity at their binder.
    fix: Vec<(String, bool)>,
    vars: Vec<String>,
    fixpoints: usize,
}

fn leaf(rng: &mut impl Rng, g: &Gen, positive: bool) -> MuFormula {
    let usable: Vec<&String> = g
        .fix
        .iter()
        .filter(|(_, p)| *p == positive)
        .map(|(z, _)| z)
        .collect();
    let choice = rng.random_range(0..8);
    match choice {
        0 => MuFormula::True,
        1 => MuFormula::False,
        2 => {
            let q = Ucq::new(vec![Cq::new(
                vec!["y".into()],
                vec![Atom::new("P", vec![Term::var("y")])],
            )])
            .unwrap();
            MuFormula::Query(q)
        }
        3 => MuFormula::Query(Ucq::atom("Q", vec![Term::constant("a")])),
        4 => {
            let v = ["On", "Off", "Any"][rng.random_range(0..3)];
            MuFormula::Context(ContextAtom::new("M", v))
        }
        5 if !g.vars.is_empty() => {
            let x = &g.vars[rng.random_range(0..g.vars.len())];
            if rng.random_bool(0.5) {
                MuFormula::Query(Ucq::atom("Q", vec![Term::var(x.clone())]))
            } else {
                MuFormula::Query(Ucq::atom(
                    "R",
                    vec![Term::var(x.clone()), Term::constant("b")],
                ))
            }
        }
        _ if !usable.is_empty() => {
            MuFormula::var(usable[rng.random_range(0..usable.len())].clone())
        }
        _ => MuFormula::Query(Ucq::atom("P", vec![Term::constant("b")])),
    }
}

fn gen(rng: &mut impl Rng, g: &mut Gen, depth: usize, positive: bool) -> MuFormula {
    if depth == 0 || rng.random_bool(0.2) {
        return leaf(rng, g, positive);
    }
    match rng.random_range(0..10) {
        0 => MuFormula::not(gen(rng, g, depth - 1, !positive)),
        1 => MuFormula::and(
            gen(rng, g, depth - 1, positive),
            gen(rng, g, depth - 1, positive),
        ),
        2 => MuFormula::or(
            gen(rng, g, depth - 1, positive),
            gen(rng, g, depth - 1, positive),
        ),
        3 => MuFormula::implies(
            gen(rng, g, depth - 1, !positive),
            gen(rng, g, depth - 1, positive),
        ),
        4 => {
            let x = format!("x{}", g.vars.len());
            g.vars.push(x.clone());
            let body = gen(rng, g, depth - 1, positive);
            g.vars.pop();
            if rng.random_bool(0.5) {
                MuFormula::exists(x, body)
            } else {
                MuFormula::forall(x, body)
            }
        }
        5 | 6 => {
            let pair = StepPair::from_steps(rng.random_bool(0.5), rng.random_bool(0.5));
            MuFormula::step(pair, gen(rng, g, depth - 1, positive))
        }
        _ if g.fixpoints < 2 => {
            let z = format!("Z{}", g.fix.len());
            g.fix.push((z.clone(), positive));
            g.fixpoints += 1;
            let body = gen(rng, g, depth - 1, positive);
            g.fixpoints -= 1;
            g.fix.pop();
            if rng.random_bool(0.5) {
                MuFormula::mu(z, body)
            } else {
                MuFormula::nu(z, body)
            }
        }
        _ => MuFormula::step(
            StepPair::from_steps(true, false),
            gen(rng, g, depth - 1, positive),
        ),
    }
}

/// A closed formula with at most two nested fixpoints whose bodies are
/// positive in their variables.
pub fn random_formula(rng: &mut impl Rng, depth: usize) -> MuFormula {
    let mut g = Gen {
        fix: Vec::new(),
        vars: Vec::new(),
        fixpoints: 0,
    };
    gen(rng, &mut g, depth, true)
}
