use std::collections::BTreeMap;

use super::eval::AboxIndex;
use super::rewrite::{rewrite_ucq, RewrittenUcq};
use super::syntax::{ABox, Atom, BasicConcept, BasicRole, Cq, TBox, TBoxAssertion, Term, Ucq};

/// Boolean query whose truth witnesses a violation of a negative inclusion
/// or functionality assertion (the latter needs a tuple check, see
/// [`find_violation`]).
fn violation_query(assertion: &TBoxAssertion) -> Option<Ucq> {
    let x = || Term::var("x");
    let y = || Term::var("y");
    let concept = |b: &BasicConcept, t: Term, other: &str| -> Atom<Term> {
        match b {
            BasicConcept::Atomic(n) => Atom::new(n.clone(), vec![t]),
            BasicConcept::Exists(r) => r.atom(t, Term::var(other)),
        }
    };
    let (atoms, exists) = match assertion {
        TBoxAssertion::ConceptDisj(b1, b2) => (
            vec![concept(b1, x(), "y1"), concept(b2, x(), "y2")],
            vec!["x", "y1", "y2"],
        ),
        TBoxAssertion::RoleDisj(r1, r2) => {
            (vec![r1.atom(x(), y()), r2.atom(x(), y())], vec!["x", "y"])
        }
        _ => return None,
    };
    let exists = exists.into_iter().map(str::to_string).collect();
    Some(Ucq::new(vec![Cq::new(exists, atoms)]).expect("well-formed violation query"))
}

/// The first violated negative inclusion or functionality assertion.
pub fn find_violation<'t>(tbox: &'t TBox, abox: &ABox) -> Option<&'t TBoxAssertion> {
    let index = AboxIndex::new(abox);
    for assertion in tbox.negative() {
        let violated = match assertion {
            TBoxAssertion::Funct(role) => functionality_violated(role, tbox, &index),
            other => {
                let q = violation_query(other).expect("negative inclusion");
                rewrite_ucq(&q, tbox).evaluate_indexed(&index).is_true()
            }
        };
        if violated {
            return Some(assertion);
        }
    }
    None
}

/// Two distinct named fillers for one subject in the role's extension,
/// saturated with the role inclusions.
fn functionality_violated(role: &BasicRole, tbox: &TBox, index: &AboxIndex<'_>) -> bool {
    let q = Ucq::cq(vec![role.atom(Term::var("s"), Term::var("t"))]);
    let rew: RewrittenUcq = rewrite_ucq(&q, tbox);
    let ext = rew.evaluate_indexed(index);
    let s_pos = ext.vars.iter().position(|v| v == "s").unwrap();
    let t_pos = 1 - s_pos;
    let mut filler: BTreeMap<&str, &str> = BTreeMap::new();
    for tuple in &ext.tuples {
        let (s, t) = (tuple[s_pos].as_str(), tuple[t_pos].as_str());
        match filler.get(s) {
            Some(prev) if *prev != t => return true,
            Some(_) => {}
            None => {
                filler.insert(s, t);
            }
        }
    }
    false
}

/// Whether `abox` is consistent with `tbox`.
pub fn is_consistent(tbox: &TBox, abox: &ABox) -> bool {
    find_violation(tbox, abox).is_none()
}
