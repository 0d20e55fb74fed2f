//! Certain answers by chasing the ABox into a universal model with labelled
//! nulls, and random chase-terminating DL-Lite_A knowledge bases.

use std::collections::{BTreeMap, BTreeSet};

use ckab::kb::{ABox, Atom, BasicConcept, BasicRole, Cq, Fact, TBox, TBoxAssertion, Term, Ucq};
use rand::Rng;

const CONCEPTS: [&str; 4] = ["A", "B", "C", "D"];
const ROLES: [&str; 3] = ["R", "S", "T"];
const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];
const NULL_PREFIX: &str = "_:n";

pub struct Kb {
    pub tbox: TBox,
    pub abox: ABox,
}

fn random_role(rng: &mut impl Rng) -> BasicRole {
    let name = ROLES[rng.random_range(0..ROLES.len())];
    if rng.random_bool(0.3) {
        BasicRole::inverse(name)
    } else {
        BasicRole::named(name)
    }
}

fn random_concept(rng: &mut impl Rng) -> BasicConcept {
    if rng.random_bool(0.6) {
        BasicConcept::atomic(CONCEPTS[rng.random_range(0..CONCEPTS.len())])
    } else {
        BasicConcept::exists(random_role(rng))
    }
}

pub fn random_kb(rng: &mut impl Rng) -> Kb {
    let mut assertions: Vec<TBoxAssertion> = Vec::new();
    let mut specialized: BTreeSet<String> = BTreeSet::new();
    let mut functional: BTreeSet<String> = BTreeSet::new();
    for _ in 0..rng.random_range(0..=6) {
        let a = match rng.random_range(0..10) {
            0..=4 => TBoxAssertion::ConceptIncl(random_concept(rng), random_concept(rng)),
            5 | 6 => {
                let (q1, q2) = (random_role(rng), random_role(rng));
                // a functional role may not be specialized
                if functional.contains(&q2.name) {
                    continue;
                }
                specialized.insert(q2.name.clone());
                TBoxAssertion::RoleIncl(q1, q2)
            }
            7 => TBoxAssertion::ConceptDisj(random_concept(rng), random_concept(rng)),
            8 => TBoxAssertion::RoleDisj(random_role(rng), random_role(rng)),
            _ => {
                let q = random_role(rng);
                if specialized.contains(&q.name) {
                    continue;
                }
                functional.insert(q.name.clone());
                TBoxAssertion::Funct(q)
            }
        };
        assertions.push(a);
    }
    let mut abox = ABox::new();
    for _ in 0..rng.random_range(0..=10) {
        let pick = |rng: &mut dyn rand::RngCore| CONSTANTS[rng.random_range(0..CONSTANTS.len())];
        if rng.random_bool(0.5) {
            let n = CONCEPTS[rng.random_range(0..CONCEPTS.len())];
            abox.insert(Fact::concept(n, pick(rng)));
        } else {
            let r = ROLES[rng.random_range(0..ROLES.len())];
            abox.insert(Fact::role(r, pick(rng), pick(rng)));
        }
    }
    Kb {
        tbox: TBox::new(assertions),
        abox,
    }
}

/// The chase of a knowledge base: concept facts and role pairs over
/// constants and nulls.
#[derive(Default, Clone)]
pub struct Model {
    pub concepts: BTreeSet<(String, String)>,
    pub roles: BTreeSet<(String, String, String)>,
    nulls: usize,
}

impl Model {
    fn pairs(&self, q: &BasicRole) -> Vec<(String, String)> {
        self.roles
            .iter()
            .filter(|(r, _, _)| *r == q.name)
            .map(|(_, x, y)| {
                if q.inverse {
                    (y.clone(), x.clone())
                } else {
                    (x.clone(), y.clone())
                }
            })
            .collect()
    }

    fn members(&self, b: &BasicConcept) -> BTreeSet<String> {
        match b {
            BasicConcept::Atomic(n) => self
                .concepts
                .iter()
                .filter(|(c, _)| c == n)
                .map(|(_, x)| x.clone())
                .collect(),
            BasicConcept::Exists(q) => self.pairs(q).into_iter().map(|(x, _)| x).collect(),
        }
    }

    fn add_pair(&mut self, q: &BasicRole, x: String, y: String) -> bool {
        let t = if q.inverse {
            (q.name.clone(), y, x)
        } else {
            (q.name.clone(), x, y)
        };
        self.roles.insert(t)
    }

    fn terms(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.concepts.iter().map(|(_, x)| x.clone()).collect();
        for (_, x, y) in &self.roles {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        out
    }
}

/// Restricted chase. `None` when it does not stop within `max_facts`.
pub fn chase(kb: &Kb, max_facts: usize) -> Option<Model> {
    let mut m = Model::default();
    for f in kb.abox.iter() {
        match f.args.as_slice() {
            [x] => {
                m.concepts.insert((f.pred.clone(), x.clone()));
            }
            [x, y] => {
                m.roles.insert((f.pred.clone(), x.clone(), y.clone()));
            }
            _ => unreachable!(),
        }
    }
    loop {
        let mut changed = false;
        for a in kb.tbox.assertions() {
            match a {
                TBoxAssertion::ConceptIncl(b1, b2) => {
                    let have = m.members(b2);
                    for x in m.members(b1) {
                        if have.contains(&x) {
                            continue;
                        }
                        changed = true;
                        match b2 {
                            BasicConcept::Atomic(n) => {
                                m.concepts.insert((n.clone(), x));
                            }
                            BasicConcept::Exists(q) => {
                                m.nulls += 1;
                                let n = format!("{NULL_PREFIX}{}", m.nulls);
                                m.add_pair(q, x, n);
                            }
                        }
                    }
                }
                TBoxAssertion::RoleIncl(q1, q2) => {
                    for (x, y) in m.pairs(q1) {
                        changed |= m.add_pair(q2, x, y);
                    }
                }
                _ => {}
            }
        }
        if m.concepts.len() + m.roles.len() > max_facts {
            return None;
        }
        if !changed {
            return Some(m);
        }
    }
}

pub fn consistent(kb: &Kb, m: &Model) -> bool {
    kb.tbox.assertions().iter().all(|a| match a {
        TBoxAssertion::ConceptDisj(b1, b2) => m.members(b1).is_disjoint(&m.members(b2)),
        TBoxAssertion::RoleDisj(q1, q2) => {
            let p1: BTreeSet<_> = m.pairs(q1).into_iter().collect();
            m.pairs(q2).into_iter().all(|p| !p1.contains(&p))
        }
        TBoxAssertion::Funct(q) => {
            let mut succ: BTreeMap<String, String> = BTreeMap::new();
            m.pairs(q).into_iter().all(|(x, y)| match succ.get(&x) {
                Some(z) => *z == y,
                None => {
                    succ.insert(x, y);
                    true
                }
            })
        }
        _ => true,
    })
}

pub fn random_ucq(rng: &mut impl Rng) -> Ucq {
    const VARS: [&str; 3] = ["x", "y", "z"];
    let nfree = rng.random_range(0..=2);
    let free: Vec<&str> = VARS[..nfree].to_vec();
    let disjuncts = rng.random_range(1..=2);
    let mut cqs = Vec::new();
    while cqs.len() < disjuncts {
        let mut atoms = Vec::new();
        let term = |rng: &mut dyn rand::RngCore| {
            if rng.random_bool(0.15) {
                Term::constant(CONSTANTS[rng.random_range(0..CONSTANTS.len())])
            } else {
                Term::var(VARS[rng.random_range(0..VARS.len())])
            }
        };
        for _ in 0..rng.random_range(1..=3) {
            if rng.random_bool(0.5) {
                let n = CONCEPTS[rng.random_range(0..CONCEPTS.len())];
                atoms.push(Atom::new(n, vec![term(rng)]));
            } else {
                let r = ROLES[rng.random_range(0..ROLES.len())];
                atoms.push(Atom::new(r, vec![term(rng), term(rng)]));
            }
        }
        let used: BTreeSet<String> = atoms
            .iter()
            .flat_map(|a: &Atom<Term>| a.args.iter().filter_map(|t| t.as_var().map(str::to_string)))
            .collect();
        if !free.iter().all(|v| used.contains(*v)) {
            continue;
        }
        let exists: Vec<String> = used
            .into_iter()
            .filter(|v| !free.contains(&v.as_str()))
            .collect();
        cqs.push(Cq::new(exists, atoms));
    }
    Ucq::new(cqs).unwrap()
}

fn matches(
    m: &Model,
    atoms: &[Atom<Term>],
    env: &mut BTreeMap<String, String>,
    terms: &[String],
    out: &mut dyn FnMut(&BTreeMap<String, String>),
) {
    let Some((first, rest)) = atoms.split_first() else {
        out(env);
        return;
    };
    // bind the first unbound variable to each term, then check the atom
    let unbound = first.args.iter().find_map(|t| match t {
        Term::Var(v) if !env.contains_key(v) => Some(v.clone()),
        _ => None,
    });
    if let Some(v) = unbound {
        for t in terms {
            env.insert(v.clone(), t.clone());
            matches(m, atoms, env, terms, out);
        }
        env.remove(&v);
        return;
    }
    let value = |t: &Term| match t {
        Term::Var(v) => env[v].clone(),
        Term::Const(c) => c.clone(),
    };
    let holds = match first.args.as_slice() {
        [x] => m.concepts.contains(&(first.pred.clone(), value(x))),
        [x, y] => m.roles.contains(&(first.pred.clone(), value(x), value(y))),
        _ => false,
    };
    if holds {
        matches(m, rest, env, terms, out);
    }
}

/// Answers of the query over the chase that mention no null.
pub fn chase_answers(m: &Model, q: &Ucq) -> BTreeSet<Vec<String>> {
    let terms: Vec<String> = m.terms().into_iter().collect();
    let mut out = BTreeSet::new();
    for cq in q.disjuncts() {
        let mut env = BTreeMap::new();
        matches(m, &cq.atoms, &mut env, &terms, &mut |env| {
            let tuple: Vec<String> = q.free().iter().map(|v| env[v].clone()).collect();
            if tuple.iter().all(|c| !c.starts_with(NULL_PREFIX)) {
                out.insert(tuple);
            }
        });
    }
    out
}
