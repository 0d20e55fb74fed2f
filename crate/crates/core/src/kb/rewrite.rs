//! Backward rewriting of UCQs over the positive inclusions of a TBox, in the
//! style of PerfectRef: atoms are rewritten with applicable inclusions and
//! pairs of unifiable atoms are merged, until no new query appears.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use super::eval::AboxIndex;
use super::syntax::{ABox, AnswerSet, Atom, BasicConcept, TBox, TBoxAssertion, Term, Ucq};

/// A conjunctive query with an explicit answer tuple. Rewriting may unify
/// answer variables with each other or with constants, so the tuple is not
/// always a list of distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeadedCq {
    pub head: Vec<Term>,
    pub atoms: Vec<Atom<Term>>,
}

/// Output of [`rewrite_ucq`]: a UCQ that is evaluated directly over an ABox.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewrittenUcq {
    pub free: Vec<String>,
    pub disjuncts: Vec<HeadedCq>,
}

impl RewrittenUcq {
    /// Plain evaluation over the ABox seen as a database.
    pub fn evaluate(&self, abox: &ABox) -> AnswerSet {
        let index = AboxIndex::new(abox);
        self.evaluate_indexed(&index)
    }

    pub fn evaluate_indexed(&self, index: &AboxIndex<'_>) -> AnswerSet {
        let mut tuples = BTreeSet::new();
        for cq in &self.disjuncts {
            index.answers(&cq.atoms, &cq.head, &mut tuples);
        }
        AnswerSet {
            vars: self.free.clone(),
            tuples,
        }
    }

    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }
}

impl fmt::Display for HeadedCq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(|t| t.to_string()).collect();
        let body: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "({}) <- {}", head.join(", "), body.join(" & "))
    }
}

/// Upper bound on generated queries; reaching it means the input is far
/// outside desk scale.
const MAX_QUERIES: usize = 200_000;

pub fn rewrite_ucq(q: &Ucq, tbox: &TBox) -> RewrittenUcq {
    let pis: Vec<&TBoxAssertion> = tbox.positive().collect();
    let mut fresh = Fresh(0);
    let mut seen: HashSet<HeadedCq> = HashSet::new();
    let mut order: Vec<HeadedCq> = Vec::new();
    let mut queue: VecDeque<HeadedCq> = VecDeque::new();

    let push = |cq: HeadedCq,
                seen: &mut HashSet<HeadedCq>,
                order: &mut Vec<HeadedCq>,
                queue: &mut VecDeque<HeadedCq>| {
        let cq = canonical(cq);
        if seen.insert(cq.clone()) {
            order.push(cq.clone());
            queue.push_back(cq);
        }
    };

    for d in q.disjuncts() {
        let head: Vec<Term> = q.free().iter().map(|v| Term::Var(v.clone())).collect();
        let mut rename = BTreeMap::new();
        for e in &d.exists {
            rename.insert(e.clone(), Term::Var(fresh.next()));
        }
        let atoms = d.atoms.iter().map(|a| subst_atom(a, &rename)).collect();
        push(HeadedCq { head, atoms }, &mut seen, &mut order, &mut queue);
    }

    while let Some(cq) = queue.pop_front() {
        if order.len() > MAX_QUERIES {
            break;
        }
        for i in 0..cq.atoms.len() {
            for pi in &pis {
                for replacement in apply_inclusion(pi, &cq, i, &mut fresh) {
                    let mut atoms = cq.atoms.clone();
                    atoms[i] = replacement;
                    push(
                        HeadedCq {
                            head: cq.head.clone(),
                            atoms,
                        },
                        &mut seen,
                        &mut order,
                        &mut queue,
                    );
                }
            }
        }
        for i in 0..cq.atoms.len() {
            for j in (i + 1)..cq.atoms.len() {
                if let Some(mgu) = unify(&cq.atoms[i], &cq.atoms[j]) {
                    let reduced = HeadedCq {
                        head: cq.head.iter().map(|t| resolve(t, &mgu)).collect(),
                        atoms: cq.atoms.iter().map(|a| subst_atom(a, &mgu)).collect(),
                    };
                    push(reduced, &mut seen, &mut order, &mut queue);
                }
            }
        }
    }

    RewrittenUcq {
        free: q.free().to_vec(),
        disjuncts: order,
    }
}

struct Fresh(usize);

impl Fresh {
    fn next(&mut self) -> String {
        self.0 += 1;
        format!("%f{}", self.0)
    }
}

fn head_vars(cq: &HeadedCq) -> BTreeSet<&str> {
    cq.head.iter().filter_map(Term::as_var).collect()
}

/// A variable is unbound when it is not answered and occurs exactly once.
fn is_unbound(cq: &HeadedCq, t: &Term) -> bool {
    let Term::Var(v) = t else { return false };
    if cq.head.iter().any(|h| h == t) {
        return false;
    }
    let occurrences = cq
        .atoms
        .iter()
        .flat_map(|a| a.args.iter())
        .filter(|x| x.as_var() == Some(v))
        .count();
    occurrences == 1
}

fn concept_atom(b: &BasicConcept, t: Term, fresh: &mut Fresh) -> Atom<Term> {
    match b {
        BasicConcept::Atomic(n) => Atom::new(n.clone(), vec![t]),
        BasicConcept::Exists(r) => r.atom(t, Term::Var(fresh.next())),
    }
}

/// Atoms that, under the inclusion, entail atom `i` of `cq`.
fn apply_inclusion(
    pi: &TBoxAssertion,
    cq: &HeadedCq,
    i: usize,
    fresh: &mut Fresh,
) -> Vec<Atom<Term>> {
    let g = &cq.atoms[i];
    let mut out = Vec::new();
    match (pi, g.args.as_slice()) {
        (TBoxAssertion::ConceptIncl(lhs, BasicConcept::Atomic(a)), [t]) if *a == g.pred => {
            out.push(concept_atom(lhs, t.clone(), fresh));
        }
        (TBoxAssertion::ConceptIncl(lhs, BasicConcept::Exists(r)), [t1, t2])
            if r.name == g.pred =>
        {
            if !r.inverse && is_unbound(cq, t2) {
                out.push(concept_atom(lhs, t1.clone(), fresh));
            }
            if r.inverse && is_unbound(cq, t1) {
                out.push(concept_atom(lhs, t2.clone(), fresh));
            }
        }
        (TBoxAssertion::RoleIncl(lhs, rhs), [t1, t2]) if rhs.name == g.pred => {
            let (a, b) = if rhs.inverse {
                (t2.clone(), t1.clone())
            } else {
                (t1.clone(), t2.clone())
            };
            out.push(lhs.atom(a, b));
        }
        _ => {}
    }
    out
}

type Mgu = BTreeMap<String, Term>;

fn resolve(t: &Term, mgu: &Mgu) -> Term {
    let mut cur = t.clone();
    while let Term::Var(v) = &cur {
        match mgu.get(v) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

fn subst_atom(a: &Atom<Term>, mgu: &Mgu) -> Atom<Term> {
    Atom {
        pred: a.pred.clone(),
        args: a.args.iter().map(|t| resolve(t, mgu)).collect(),
    }
}

/// Most general unifier of two atoms, if any.
fn unify(a: &Atom<Term>, b: &Atom<Term>) -> Option<Mgu> {
    if a.pred != b.pred || a.args.len() != b.args.len() || a == b {
        return None;
    }
    let mut mgu = Mgu::new();
    for (x, y) in a.args.iter().zip(&b.args) {
        let (x, y) = (resolve(x, &mgu), resolve(y, &mgu));
        match (&x, &y) {
            _ if x == y => {}
            (Term::Const(_), Term::Const(_)) => return None,
            // bind fresh (internal) variables first so answer variables keep
            // their names where possible
            (Term::Var(v), _) if v.starts_with('%') || matches!(y, Term::Const(_)) => {
                mgu.insert(v.clone(), y.clone());
            }
            (_, Term::Var(w)) => {
                mgu.insert(w.clone(), x.clone());
            }
            (Term::Var(v), _) => {
                mgu.insert(v.clone(), y.clone());
            }
        }
    }
    Some(mgu)
}

/// Renames non-answer variables deterministically and sorts/deduplicates the
/// atoms, so that most isomorphic queries get the same representation.
fn canonical(cq: HeadedCq) -> HeadedCq {
    let answer: BTreeSet<String> = head_vars(&cq).into_iter().map(str::to_string).collect();
    let mut atoms = cq.atoms;
    atoms.sort();
    atoms.dedup();
    let is_local = |t: &Term| matches!(t, Term::Var(v) if !answer.contains(v));
    for _ in 0..4 {
        atoms.sort_by(|x, y| {
            let key = |a: &Atom<Term>| {
                (
                    a.pred.clone(),
                    a.args
                        .iter()
                        .map(|t| match t {
                            Term::Var(v) if answer.contains(v) => (0, v.clone()),
                            Term::Const(c) => (1, c.clone()),
                            Term::Var(_) => (2, String::new()),
                        })
                        .collect::<Vec<_>>(),
                )
            };
            key(x).cmp(&key(y)).then_with(|| x.cmp(y))
        });
        let mut rename: Mgu = BTreeMap::new();
        for a in &atoms {
            for t in &a.args {
                if let (true, Term::Var(v)) = (is_local(t), t) {
                    if !rename.contains_key(v) {
                        let n = rename.len();
                        rename.insert(v.clone(), Term::Var(format!("%{n}")));
                    }
                }
            }
        }
        let renamed: Vec<Atom<Term>> = atoms
            .iter()
            .map(|a| Atom {
                pred: a.pred.clone(),
                args: a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => rename.get(v).cloned().unwrap_or_else(|| t.clone()),
                        _ => t.clone(),
                    })
                    .collect(),
            })
            .collect();
        let mut sorted = renamed.clone();
        sorted.sort();
        sorted.dedup();
        if renamed == atoms {
            break;
        }
        atoms = sorted;
    }
    HeadedCq {
        head: cq.head,
        atoms,
    }
}
