use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::formula::MuFormula;
use super::stateset::StateSet;
use super::witness::{explain, Witness};
use crate::context::{ContextAtom, ContextError, ContextExpr, ContextState};
use crate::dsl::print_formula;
use crate::kb::{AnswerSet, Reasoner, Ucq, MARKER_CONSTANT};
use crate::statespace::{StateId, TransitionSystem};

/// Individual variable valuation.
pub type Valuation = BTreeMap<String, String>;
/// Fixpoint variable valuation.
pub type FixValuation = BTreeMap<String, StateSet>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("fixpoint {0} is not monotone: its iterates shrank")]
    NonMonotone(String),
    #[error("unbound fixpoint variable {0}")]
    UnboundFixVar(String),
    #[error("individual variable ?{0} has no value")]
    UnboundVar(String),
    #[error(transparent)]
    Context(#[from] ContextError),
}

/// Extent of one closed subformula.
#[derive(Debug, Clone, Serialize)]
pub struct SubformulaExtent {
    pub formula: String,
    pub states: StateSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub holds: bool,
    pub extent: StateSet,
    /// Closed subformulas in pre-order, each listed once.
    pub subformulas: Vec<SubformulaExtent>,
    pub witness: Option<Witness>,
}

type MemoKey = (MuFormula, Vec<(String, String)>, Vec<(String, StateSet)>);

/// Evaluates formulas over one transition system, sharing query answers and
/// subformula extents between calls.
pub struct ModelChecker<'a> {
    ts: &'a TransitionSystem,
    reasoners: Vec<Reasoner>,
    reasoner_of: Vec<usize>,
    contexts: Vec<ContextState>,
    adoms: Vec<Vec<String>>,
    all_values: Vec<String>,
    answers: HashMap<Ucq, Vec<AnswerSet>>,
    context_atoms: HashMap<ContextAtom, StateSet>,
    free: HashMap<MuFormula, (Vec<String>, Vec<String>)>,
    memo: HashMap<MemoKey, StateSet>,
}

impl<'a> ModelChecker<'a> {
    pub fn new(ts: &'a TransitionSystem) -> Result<Self, CheckError> {
        let mut index: BTreeMap<&ContextState, usize> = BTreeMap::new();
        let mut contexts = Vec::new();
        let mut reasoners = Vec::new();
        let mut reasoner_of = Vec::with_capacity(ts.len());
        for s in ts.states() {
            let i = match index.get(&s.ctx) {
                Some(&i) => i,
                None => {
                    let tbox = ts.ctbox().in_context(ts.schema(), &s.ctx)?;
                    reasoners.push(Reasoner::new(tbox));
                    contexts.push(s.ctx.clone());
                    index.insert(&s.ctx, reasoners.len() - 1);
                    reasoners.len() - 1
                }
            };
            reasoner_of.push(i);
        }
        let adoms: Vec<Vec<String>> = ts
            .states()
            .iter()
            .map(|s| {
                let mut d = s.abox.adom();
                d.remove(MARKER_CONSTANT);
                d.into_iter().collect()
            })
            .collect();
        let all_values: BTreeSet<String> = adoms.iter().flatten().cloned().collect();
        Ok(ModelChecker {
            ts,
            reasoners,
            reasoner_of,
            contexts,
            adoms,
            all_values: all_values.into_iter().collect(),
            answers: HashMap::new(),
            context_atoms: HashMap::new(),
            free: HashMap::new(),
            memo: HashMap::new(),
        })
    }

    pub fn ts(&self) -> &'a TransitionSystem {
        self.ts
    }

    pub(crate) fn adom(&self, s: StateId) -> &[String] {
        &self.adoms[s]
    }

    fn n(&self) -> usize {
        self.ts.len()
    }

    /// States satisfying `f` under `v` and `fix`.
    pub fn extension(
        &mut self,
        f: &MuFormula,
        v: &Valuation,
        fix: &FixValuation,
    ) -> Result<StateSet, CheckError> {
        let memoize = !matches!(
            f,
            MuFormula::True | MuFormula::False | MuFormula::Var(_) | MuFormula::Context(_)
        );
        let key = if memoize {
            let key = self.memo_key(f, v, fix);
            if let Some(hit) = self.memo.get(&key) {
                return Ok(hit.clone());
            }
            Some(key)
        } else {
            None
        };
        let result = self.compute(f, v, fix)?;
        if let Some(key) = key {
            self.memo.insert(key, result.clone());
        }
        Ok(result)
    }

    fn memo_key(&mut self, f: &MuFormula, v: &Valuation, fix: &FixValuation) -> MemoKey {
        let (vars, fvars) = match self.free.get(f) {
            Some(fv) => fv.clone(),
            None => {
                let fv: (Vec<String>, Vec<String>) = (
                    f.free_vars().into_iter().collect(),
                    f.free_fix_vars().into_iter().collect(),
                );
                self.free.insert(f.clone(), fv.clone());
                fv
            }
        };
        let vs = vars
            .iter()
            .filter_map(|x| v.get(x).map(|d| (x.clone(), d.clone())))
            .collect();
        let zs = fvars
            .iter()
            .filter_map(|z| fix.get(z).map(|s| (z.clone(), s.clone())))
            .collect();
        (f.clone(), vs, zs)
    }

    fn compute(
        &mut self,
        f: &MuFormula,
        v: &Valuation,
        fix: &FixValuation,
    ) -> Result<StateSet, CheckError> {
        let n = self.n();
        Ok(match f {
            MuFormula::True => StateSet::full(n),
            MuFormula::False => StateSet::empty(n),
            MuFormula::Query(q) => self.query(q, v)?,
            MuFormula::Context(a) => self.context_atom(a)?,
            MuFormula::Var(z) => fix
                .get(z)
                .cloned()
                .ok_or_else(|| CheckError::UnboundFixVar(z.clone()))?,
            MuFormula::Not(a) => self.extension(a, v, fix)?.complement(),
            MuFormula::And(a, b) => {
                let x = self.extension(a, v, fix)?;
                x.intersection(&self.extension(b, v, fix)?)
            }
            MuFormula::Or(a, b) => {
                let x = self.extension(a, v, fix)?;
                x.union(&self.extension(b, v, fix)?)
            }
            MuFormula::Implies(a, b) => {
                let x = self.extension(a, v, fix)?.complement();
                x.union(&self.extension(b, v, fix)?)
            }
            MuFormula::Exists(x, body) | MuFormula::Forall(x, body) => {
                let existential = matches!(f, MuFormula::Exists(..));
                let mut per_value = HashMap::new();
                for d in self.all_values.clone() {
                    let mut v2 = v.clone();
                    v2.insert(x.clone(), d.clone());
                    per_value.insert(d, self.extension(body, &v2, fix)?);
                }
                let mut out = StateSet::empty(n);
                for s in 0..n {
                    let mut vals = self.adoms[s].iter().map(|d| per_value[d].contains(s));
                    let member = if existential {
                        vals.any(|b| b)
                    } else {
                        vals.all(|b| b)
                    };
                    if member {
                        out.insert(s);
                    }
                }
                out
            }
            MuFormula::Step(pair, body) => {
                let inner = self.extension(body, v, fix)?;
                let (first, second) = pair.steps();
                let mid = self.single_step(second, &inner);
                self.single_step(first, &mid)
            }
            MuFormula::Mu(z, body) | MuFormula::Nu(z, body) => {
                let least = matches!(f, MuFormula::Mu(..));
                self.fixpoint(z, body, least, v, fix)?.0
            }
        })
    }

    /// Kleene iteration; returns the fixpoint and the sequence of iterates.
    pub(crate) fn fixpoint(
        &mut self,
        z: &str,
        body: &MuFormula,
        least: bool,
        v: &Valuation,
        fix: &FixValuation,
    ) -> Result<(StateSet, Vec<StateSet>), CheckError> {
        let n = self.n();
        let mut cur = if least {
            StateSet::empty(n)
        } else {
            StateSet::full(n)
        };
        let mut iterates = vec![cur.clone()];
        let mut env = fix.clone();
        loop {
            env.insert(z.to_string(), cur.clone());
            let next = self.extension(body, v, &env)?;
            let ordered = if least {
                cur.is_subset(&next)
            } else {
                next.is_subset(&cur)
            };
            if !ordered {
                return Err(CheckError::NonMonotone(z.to_string()));
            }
            if next == cur {
                return Ok((cur, iterates));
            }
            iterates.push(next.clone());
            cur = next;
        }
    }

    /// States with some successor in `x` (diamond) or all successors in
    /// `x` (box).
    pub fn single_step(&self, diamond: bool, x: &StateSet) -> StateSet {
        let n = self.n();
        let mut out = StateSet::empty(n);
        for s in 0..n {
            let succ = self.ts.successors(s);
            let member = if diamond {
                succ.iter().any(|&t| x.contains(t))
            } else {
                succ.iter().all(|&t| x.contains(t))
            };
            if member {
                out.insert(s);
            }
        }
        out
    }

    fn query(&mut self, q: &Ucq, v: &Valuation) -> Result<StateSet, CheckError> {
        if !self.answers.contains_key(q) {
            let per_state: Vec<AnswerSet> = (0..self.n())
                .map(|s| {
                    let r = &self.reasoners[self.reasoner_of[s]];
                    r.rewrite(q).evaluate(&self.ts.state(s).abox)
                })
                .collect();
            self.answers.insert(q.clone(), per_state);
        }
        let ans = &self.answers[q];
        let mut binding = Valuation::new();
        for x in q.free() {
            let d = v.get(x).ok_or_else(|| CheckError::UnboundVar(x.clone()))?;
            binding.insert(x.clone(), d.clone());
        }
        Ok(StateSet::from_ids(
            self.n(),
            (0..self.n()).filter(|&s| ans[s].contains_binding(&binding)),
        ))
    }

    fn context_atom(&mut self, a: &ContextAtom) -> Result<StateSet, CheckError> {
        if let Some(s) = self.context_atoms.get(a) {
            return Ok(s.clone());
        }
        let expr = ContextExpr::Atom(a.clone());
        let mut holds = Vec::with_capacity(self.contexts.len());
        for c in &self.contexts {
            holds.push(self.ts.schema().entails(c, &expr)?);
        }
        let set = StateSet::from_ids(
            self.n(),
            (0..self.n()).filter(|&s| holds[self.reasoner_of[s]]),
        );
        self.context_atoms.insert(a.clone(), set.clone());
        Ok(set)
    }

    /// Decides whether the initial state satisfies a closed formula.
    pub fn check(&mut self, f: &MuFormula) -> Result<CheckResult, CheckError> {
        let extent = self.extension(f, &Valuation::new(), &FixValuation::new())?;
        let holds = extent.contains(self.ts.initial());
        let mut subformulas = Vec::new();
        let mut seen = BTreeSet::new();
        let mut closed = Vec::new();
        closed_subformulas(f, &mut closed);
        for g in closed {
            let text = print_formula(g);
            if seen.insert(text.clone()) {
                let states = self.extension(g, &Valuation::new(), &FixValuation::new())?;
                subformulas.push(SubformulaExtent {
                    formula: text,
                    states,
                });
            }
        }
        let witness = explain(self, f, holds)?;
        Ok(CheckResult {
            holds,
            extent,
            subformulas,
            witness,
        })
    }
}

fn closed_subformulas<'f>(f: &'f MuFormula, out: &mut Vec<&'f MuFormula>) {
    if f.is_closed() {
        out.push(f);
    }
    for c in f.children() {
        closed_subformulas(c, out);
    }
}

/// States of `ts` satisfying `f` under the given valuations.
pub fn extension(
    ts: &TransitionSystem,
    f: &MuFormula,
    v: &Valuation,
    fix: &FixValuation,
) -> Result<StateSet, CheckError> {
    ModelChecker::new(ts)?.extension(f, v, fix)
}

/// Whether the initial state of `ts` satisfies the closed formula `f`.
pub fn model_check(ts: &TransitionSystem, f: &MuFormula) -> Result<CheckResult, CheckError> {
    ModelChecker::new(ts)?.check(f)
}
