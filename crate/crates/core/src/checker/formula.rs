use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::context::ContextAtom;
use crate::kb::{Term, Ucq};

/// The four two-step modalities. Steps always come in pairs so that local
/// formulas are only evaluated at stable states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StepPair {
    DiamondDiamond,
    DiamondBox,
    BoxDiamond,
    BoxBox,
}

impl StepPair {
    pub fn token(self) -> &'static str {
        match self {
            StepPair::DiamondDiamond => "<-><->",
            StepPair::DiamondBox => "<->[-]",
            StepPair::BoxDiamond => "[-]<->",
            StepPair::BoxBox => "[-][-]",
        }
    }

    /// `(first step is a diamond, second step is a diamond)`.
    pub fn steps(self) -> (bool, bool) {
        match self {
            StepPair::DiamondDiamond => (true, true),
            StepPair::DiamondBox => (true, false),
            StepPair::BoxDiamond => (false, true),
            StepPair::BoxBox => (false, false),
        }
    }

    pub fn from_steps(first_diamond: bool, second_diamond: bool) -> Self {
        match (first_diamond, second_diamond) {
            (true, true) => StepPair::DiamondDiamond,
            (true, false) => StepPair::DiamondBox,
            (false, true) => StepPair::BoxDiamond,
            (false, false) => StepPair::BoxBox,
        }
    }

    /// The pair `M` such that `self Φ ≡ ¬ M ¬Φ`.
    pub fn dual(self) -> Self {
        let (a, b) = self.steps();
        StepPair::from_steps(!a, !b)
    }
}

/// Context-sensitive first-order μ-calculus formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MuFormula {
    True,
    False,
    Query(Ucq),
    Context(ContextAtom),
    /// Fixpoint variable.
    Var(String),
    Not(Box<MuFormula>),
    And(Box<MuFormula>, Box<MuFormula>),
    Or(Box<MuFormula>, Box<MuFormula>),
    Implies(Box<MuFormula>, Box<MuFormula>),
    Exists(String, Box<MuFormula>),
    Forall(String, Box<MuFormula>),
    Step(StepPair, Box<MuFormula>),
    Mu(String, Box<MuFormula>),
    Nu(String, Box<MuFormula>),
}

impl MuFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: MuFormula) -> Self {
        MuFormula::Not(Box::new(f))
    }

    pub fn and(a: MuFormula, b: MuFormula) -> Self {
        MuFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: MuFormula, b: MuFormula) -> Self {
        MuFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: MuFormula, b: MuFormula) -> Self {
        MuFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<String>, f: MuFormula) -> Self {
        MuFormula::Exists(x.into(), Box::new(f))
    }

    pub fn forall(x: impl Into<String>, f: MuFormula) -> Self {
        MuFormula::Forall(x.into(), Box::new(f))
    }

    pub fn step(pair: StepPair, f: MuFormula) -> Self {
        MuFormula::Step(pair, Box::new(f))
    }

    pub fn mu(z: impl Into<String>, f: MuFormula) -> Self {
        MuFormula::Mu(z.into(), Box::new(f))
    }

    pub fn nu(z: impl Into<String>, f: MuFormula) -> Self {
        MuFormula::Nu(z.into(), Box::new(f))
    }

    pub fn var(z: impl Into<String>) -> Self {
        MuFormula::Var(z.into())
    }

    pub fn query(q: Ucq) -> Self {
        MuFormula::Query(q)
    }

    pub fn children(&self) -> Vec<&MuFormula> {
        use MuFormula::*;
        match self {
            True | False | Query(_) | Context(_) | Var(_) => vec![],
            Not(a) | Exists(_, a) | Forall(_, a) | Step(_, a) | Mu(_, a) | Nu(_, a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) => vec![a, b],
        }
    }

    /// Free individual variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            MuFormula::Query(q) => q.free().iter().cloned().collect(),
            MuFormula::Exists(x, f) | MuFormula::Forall(x, f) => {
                let mut s = f.free_vars();
                s.remove(x);
                s
            }
            _ => self
                .children()
                .into_iter()
                .flat_map(MuFormula::free_vars)
                .collect(),
        }
    }

    /// Free fixpoint variables.
    pub fn free_fix_vars(&self) -> BTreeSet<String> {
        match self {
            MuFormula::Var(z) => BTreeSet::from([z.clone()]),
            MuFormula::Mu(z, f) | MuFormula::Nu(z, f) => {
                let mut s = f.free_fix_vars();
                s.remove(z);
                s
            }
            _ => self
                .children()
                .into_iter()
                .flat_map(MuFormula::free_fix_vars)
                .collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty() && self.free_fix_vars().is_empty()
    }

    /// Individual constants mentioned in query leaves.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let MuFormula::Query(q) = f {
                for d in q.disjuncts() {
                    for a in &d.atoms {
                        for t in &a.args {
                            if let Term::Const(c) = t {
                                out.insert(c.clone());
                            }
                        }
                    }
                }
            }
        });
        out
    }

    pub fn context_atoms(&self) -> Vec<&ContextAtom> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a MuFormula, out: &mut Vec<&'a ContextAtom>) {
            if let MuFormula::Context(a) = f {
                out.push(a);
            }
            f.children().into_iter().for_each(|c| walk(c, out));
        }
        walk(self, &mut out);
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&MuFormula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Number of fixpoint operators on the deepest nesting path.
    pub fn fixpoint_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(MuFormula::fixpoint_depth)
            .max()
            .unwrap_or(0);
        match self {
            MuFormula::Mu(..) | MuFormula::Nu(..) => inner + 1,
            _ => inner,
        }
    }

    /// Whether every free occurrence of `z` is under an even number of
    /// negations (the antecedent of an implication counts as one).
    pub fn is_positive_in(&self, z: &str) -> bool {
        self.polarity_ok(z, true)
    }

    fn polarity_ok(&self, z: &str, positive: bool) -> bool {
        match self {
            MuFormula::Var(v) => v != z || positive,
            MuFormula::Not(a) => a.polarity_ok(z, !positive),
            MuFormula::Implies(a, b) => a.polarity_ok(z, !positive) && b.polarity_ok(z, positive),
            MuFormula::Mu(v, _) | MuFormula::Nu(v, _) if v == z => true,
            _ => self
                .children()
                .into_iter()
                .all(|c| c.polarity_ok(z, positive)),
        }
    }

    /// Replaces free occurrences of fixpoint variable `z` by `by`.
    pub fn substitute_var(&self, z: &str, by: &MuFormula) -> MuFormula {
        use MuFormula::*;
        let rec = |f: &MuFormula| Box::new(f.substitute_var(z, by));
        match self {
            Var(v) if v == z => by.clone(),
            True | False | Query(_) | Context(_) | Var(_) => self.clone(),
            Mu(v, _) | Nu(v, _) if v == z => self.clone(),
            Not(a) => Not(rec(a)),
            And(a, b) => And(rec(a), rec(b)),
            Or(a, b) => Or(rec(a), rec(b)),
            Implies(a, b) => Implies(rec(a), rec(b)),
            Exists(x, a) => Exists(x.clone(), rec(a)),
            Forall(x, a) => Forall(x.clone(), rec(a)),
            Step(p, a) => Step(*p, rec(a)),
            Mu(v, a) => Mu(v.clone(), rec(a)),
            Nu(v, a) => Nu(v.clone(), rec(a)),
        }
    }
}
