use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reserved concept name of the intermediate-state marker.
pub const MARKER_CONCEPT: &str = "State";
/// Reserved constant of the intermediate-state marker.
pub const MARKER_CONSTANT: &str = "inter";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// A predicate applied to arguments. Concepts have one argument, roles two.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom<T> {
    pub pred: String,
    pub args: Vec<T>,
}

impl<T> Atom<T> {
    pub fn new(pred: impl Into<String>, args: Vec<T>) -> Self {
        Atom {
            pred: pred.into(),
            args,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Atom<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A ground ABox assertion `N(c)` or `P(c1, c2)`.
pub type Fact = Atom<String>;

impl Fact {
    pub fn concept(name: impl Into<String>, c: impl Into<String>) -> Self {
        Atom::new(name, vec![c.into()])
    }

    pub fn role(name: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Self {
        Atom::new(name, vec![a.into(), b.into()])
    }

    pub fn marker() -> Self {
        Fact::concept(MARKER_CONCEPT, MARKER_CONSTANT)
    }

    pub fn is_marker(&self) -> bool {
        self.pred == MARKER_CONCEPT && self.args.len() == 1 && self.args[0] == MARKER_CONSTANT
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ABox(BTreeSet<Fact>);

impl ABox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, fact: Fact) -> bool {
        self.0.insert(fact)
    }

    pub fn remove(&mut self, fact: &Fact) -> bool {
        self.0.remove(fact)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.0.contains(fact)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.0.iter()
    }

    /// The constants appearing in the ABox.
    pub fn adom(&self) -> BTreeSet<String> {
        self.0.iter().flat_map(|f| f.args.iter().cloned()).collect()
    }

    pub fn has_marker(&self) -> bool {
        self.0.contains(&Fact::marker())
    }

    pub fn without_marker(&self) -> ABox {
        let mut out = self.clone();
        out.0.remove(&Fact::marker());
        out
    }
}

impl FromIterator<Fact> for ABox {
    fn from_iter<I: IntoIterator<Item = Fact>>(iter: I) -> Self {
        ABox(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a ABox {
    type Item = &'a Fact;
    type IntoIter = std::collections::btree_set::Iter<'a, Fact>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ABox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A role name or its inverse.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasicRole {
    pub name: String,
    pub inverse: bool,
}

impl BasicRole {
    pub fn named(name: impl Into<String>) -> Self {
        BasicRole {
            name: name.into(),
            inverse: false,
        }
    }

    pub fn inverse(name: impl Into<String>) -> Self {
        BasicRole {
            name: name.into(),
            inverse: true,
        }
    }

    pub fn inverted(&self) -> Self {
        BasicRole {
            name: self.name.clone(),
            inverse: !self.inverse,
        }
    }

    /// The atom asserting `(a, b)` is in this role.
    pub fn atom<T>(&self, a: T, b: T) -> Atom<T> {
        if self.inverse {
            Atom::new(self.name.clone(), vec![b, a])
        } else {
            Atom::new(self.name.clone(), vec![a, b])
        }
    }
}

impl fmt::Display for BasicRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BasicConcept {
    Atomic(String),
    Exists(BasicRole),
}

impl BasicConcept {
    pub fn atomic(name: impl Into<String>) -> Self {
        BasicConcept::Atomic(name.into())
    }

    pub fn exists(role: BasicRole) -> Self {
        BasicConcept::Exists(role)
    }
}

impl fmt::Display for BasicConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicConcept::Atomic(n) => write!(f, "{n}"),
            BasicConcept::Exists(r) => write!(f, "exists {r}"),
        }
    }
}

/// The five DL-Lite assertion forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TBoxAssertion {
    ConceptIncl(BasicConcept, BasicConcept),
    RoleIncl(BasicRole, BasicRole),
    ConceptDisj(BasicConcept, BasicConcept),
    RoleDisj(BasicRole, BasicRole),
    Funct(BasicRole),
}

impl TBoxAssertion {
    pub fn is_positive(&self) -> bool {
        matches!(
            self,
            TBoxAssertion::ConceptIncl(..) | TBoxAssertion::RoleIncl(..)
        )
    }

    /// Concept names and role names mentioned by the assertion.
    pub fn names(&self) -> (Vec<&str>, Vec<&str>) {
        fn concept<'a>(b: &'a BasicConcept, cs: &mut Vec<&'a str>, rs: &mut Vec<&'a str>) {
            match b {
                BasicConcept::Atomic(n) => cs.push(n),
                BasicConcept::Exists(r) => rs.push(&r.name),
            }
        }
        let (mut cs, mut rs) = (Vec::new(), Vec::new());
        match self {
            TBoxAssertion::ConceptIncl(a, b) | TBoxAssertion::ConceptDisj(a, b) => {
                concept(a, &mut cs, &mut rs);
                concept(b, &mut cs, &mut rs);
            }
            TBoxAssertion::RoleIncl(a, b) | TBoxAssertion::RoleDisj(a, b) => {
                rs.push(&a.name);
                rs.push(&b.name);
            }
            TBoxAssertion::Funct(r) => rs.push(&r.name),
        }
        (cs, rs)
    }
}

impl fmt::Display for TBoxAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TBoxAssertion::ConceptIncl(a, b) => write!(f, "{a} [= {b}"),
            TBoxAssertion::RoleIncl(a, b) => write!(f, "{a} [= {b}"),
            TBoxAssertion::ConceptDisj(a, b) => write!(f, "{a} [= !{b}"),
            TBoxAssertion::RoleDisj(a, b) => write!(f, "{a} [= !{b}"),
            TBoxAssertion::Funct(r) => write!(f, "funct {r}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TBox(Vec<TBoxAssertion>);

impl TBox {
    pub fn new(assertions: impl IntoIterator<Item = TBoxAssertion>) -> Self {
        let set: BTreeSet<_> = assertions.into_iter().collect();
        TBox(set.into_iter().collect())
    }

    pub fn assertions(&self) -> &[TBoxAssertion] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn positive(&self) -> impl Iterator<Item = &TBoxAssertion> {
        self.0.iter().filter(|a| a.is_positive())
    }

    pub fn negative(&self) -> impl Iterator<Item = &TBoxAssertion> {
        self.0.iter().filter(|a| !a.is_positive())
    }
}

impl FromIterator<TBoxAssertion> for TBox {
    fn from_iter<I: IntoIterator<Item = TBoxAssertion>>(iter: I) -> Self {
        TBox::new(iter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("disjuncts of a union disagree on free variables: {0:?} vs {1:?}")]
    FreeVariableMismatch(Vec<String>, Vec<String>),
    #[error("a union of conjunctive queries needs at least one disjunct")]
    Empty,
    #[error("conjunctive query has no atoms")]
    NoAtoms,
}

/// A conjunctive query; variables not listed in `exists` are free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cq {
    pub exists: Vec<String>,
    pub atoms: Vec<Atom<Term>>,
}

impl Cq {
    pub fn new(exists: Vec<String>, atoms: Vec<Atom<Term>>) -> Self {
        Cq { exists, atoms }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        self.atoms
            .iter()
            .flat_map(|a| a.args.iter().filter_map(Term::as_var))
            .collect()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.vars()
            .into_iter()
            .filter(|v| !self.exists.iter().any(|e| e == v))
            .map(str::to_string)
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<&str> {
        self.atoms
            .iter()
            .flat_map(|a| {
                a.args.iter().filter_map(|t| match t {
                    Term::Const(c) => Some(c.as_str()),
                    Term::Var(_) => None,
                })
            })
            .collect()
    }
}

/// A union of conjunctive queries sharing the same free variables.
/// `free` is kept sorted; answer tuples follow that order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ucq {
    free: Vec<String>,
    disjuncts: Vec<Cq>,
}

impl Ucq {
    pub fn new(disjuncts: Vec<Cq>) -> Result<Self, QueryError> {
        let first = disjuncts.first().ok_or(QueryError::Empty)?;
        let free = first.free_vars();
        for d in &disjuncts {
            if d.atoms.is_empty() {
                return Err(QueryError::NoAtoms);
            }
            let fv = d.free_vars();
            if fv != free {
                return Err(QueryError::FreeVariableMismatch(
                    free.into_iter().collect(),
                    fv.into_iter().collect(),
                ));
            }
        }
        Ok(Ucq {
            free: free.into_iter().collect(),
            disjuncts,
        })
    }

    /// A single-disjunct query whose variables are all free.
    pub fn cq(atoms: Vec<Atom<Term>>) -> Self {
        Ucq::new(vec![Cq::new(vec![], atoms)]).expect("non-empty conjunctive query")
    }

    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Ucq::cq(vec![Atom::new(pred, args)])
    }

    pub fn free(&self) -> &[String] {
        &self.free
    }

    pub fn disjuncts(&self) -> &[Cq] {
        &self.disjuncts
    }

    pub fn predicates(&self) -> BTreeSet<&str> {
        self.disjuncts
            .iter()
            .flat_map(|d| d.atoms.iter().map(|a| a.pred.as_str()))
            .collect()
    }

    /// Replaces free variables by constants; the substituted variables are no
    /// longer free.
    pub fn substitute(&self, sub: &BTreeMap<String, String>) -> Ucq {
        let disjuncts = self
            .disjuncts
            .iter()
            .map(|d| Cq {
                exists: d.exists.clone(),
                atoms: d
                    .atoms
                    .iter()
                    .map(|a| Atom {
                        pred: a.pred.clone(),
                        args: a
                            .args
                            .iter()
                            .map(|t| match t {
                                Term::Var(v) if !d.exists.contains(v) => sub
                                    .get(v)
                                    .map(|c| Term::Const(c.clone()))
                                    .unwrap_or_else(|| t.clone()),
                                _ => t.clone(),
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        Ucq {
            free: self
                .free
                .iter()
                .filter(|v| !sub.contains_key(*v))
                .cloned()
                .collect(),
            disjuncts,
        }
    }
}

/// First-order queries whose atoms are UCQs under certain-answer semantics.
/// `Or`, `Implies`, `Forall` and the constants are derived forms kept for
/// faithful printing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ecq {
    True,
    False,
    Ucq(Ucq),
    Not(Box<Ecq>),
    And(Box<Ecq>, Box<Ecq>),
    Or(Box<Ecq>, Box<Ecq>),
    Implies(Box<Ecq>, Box<Ecq>),
    Exists(String, Box<Ecq>),
    Forall(String, Box<Ecq>),
}

impl Ecq {
    #[allow(clippy::should_implement_trait)]
    pub fn not(q: Ecq) -> Self {
        Ecq::Not(Box::new(q))
    }

    pub fn and(a: Ecq, b: Ecq) -> Self {
        Ecq::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ecq, b: Ecq) -> Self {
        Ecq::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, q: Ecq) -> Self {
        Ecq::Exists(v.into(), Box::new(q))
    }

    pub fn forall(v: impl Into<String>, q: Ecq) -> Self {
        Ecq::Forall(v.into(), Box::new(q))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Ecq::True | Ecq::False => BTreeSet::new(),
            Ecq::Ucq(q) => q.free().iter().cloned().collect(),
            Ecq::Not(q) => q.free_vars(),
            Ecq::And(a, b) | Ecq::Or(a, b) | Ecq::Implies(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Ecq::Exists(v, q) | Ecq::Forall(v, q) => {
                let mut s = q.free_vars();
                s.remove(v);
                s
            }
        }
    }

    pub fn ucqs(&self) -> Vec<&Ucq> {
        let mut out = Vec::new();
        self.collect_ucqs(&mut out);
        out
    }

    fn collect_ucqs<'a>(&'a self, out: &mut Vec<&'a Ucq>) {
        match self {
            Ecq::True | Ecq::False => {}
            Ecq::Ucq(q) => out.push(q),
            Ecq::Not(q) | Ecq::Exists(_, q) | Ecq::Forall(_, q) => q.collect_ucqs(out),
            Ecq::And(a, b) | Ecq::Or(a, b) | Ecq::Implies(a, b) => {
                a.collect_ucqs(out);
                b.collect_ucqs(out);
            }
        }
    }

    /// Substitutes free variables by constants.
    pub fn substitute(&self, sub: &BTreeMap<String, String>) -> Ecq {
        match self {
            Ecq::True | Ecq::False => self.clone(),
            Ecq::Ucq(q) => Ecq::Ucq(q.substitute(sub)),
            Ecq::Not(q) => Ecq::not(q.substitute(sub)),
            Ecq::And(a, b) => Ecq::and(a.substitute(sub), b.substitute(sub)),
            Ecq::Or(a, b) => Ecq::or(a.substitute(sub), b.substitute(sub)),
            Ecq::Implies(a, b) => {
                Ecq::Implies(Box::new(a.substitute(sub)), Box::new(b.substitute(sub)))
            }
            Ecq::Exists(v, q) | Ecq::Forall(v, q) => {
                let mut inner = sub.clone();
                inner.remove(v);
                let body = Box::new(q.substitute(&inner));
                if matches!(self, Ecq::Exists(..)) {
                    Ecq::Exists(v.clone(), body)
                } else {
                    Ecq::Forall(v.clone(), body)
                }
            }
        }
    }
}

/// A mapping from query variables to constants.
pub type Substitution = BTreeMap<String, String>;

/// Answers of an open query: tuples over `vars` (sorted variable names).
/// A closed query is true iff the set contains the empty tuple.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnswerSet {
    pub vars: Vec<String>,
    pub tuples: BTreeSet<Vec<String>>,
}

impl AnswerSet {
    pub fn boolean(value: bool) -> Self {
        let mut tuples = BTreeSet::new();
        if value {
            tuples.insert(vec![]);
        }
        AnswerSet {
            vars: vec![],
            tuples,
        }
    }

    pub fn is_true(&self) -> bool {
        !self.tuples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn substitutions(&self) -> Vec<Substitution> {
        self.tuples
            .iter()
            .map(|t| self.vars.iter().cloned().zip(t.iter().cloned()).collect())
            .collect()
    }

    /// Whether the binding (which must cover `vars`) is an answer.
    pub fn contains_binding(&self, binding: &Substitution) -> bool {
        let mut tuple = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            match binding.get(v) {
                Some(c) => tuple.push(c.clone()),
                None => return false,
            }
        }
        self.tuples.contains(&tuple)
    }
}
