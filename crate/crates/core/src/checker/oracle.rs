//! A slow reference semantics for μL_C, used to cross-check the model
//! checker. It decides membership state by state and computes fixpoints
//! without Kleene iteration from the usual end: small systems enumerate every
//! subset, larger ones iterate the dual fixpoint from the opposite bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::eval::Valuation;
use super::formula::MuFormula;
use super::stateset::StateSet;
use crate::context::{ContextError, ContextExpr};
use crate::kb::{certain_answers_ucq, AnswerSet, TBox, Ucq, MARKER_CONSTANT};
use crate::statespace::{StateId, TransitionSystem};

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub max_states: usize,
    /// Systems up to this size compute fixpoints by subset enumeration.
    pub enumerate_up_to: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_states: 500,
            enumerate_up_to: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} states exceed the oracle limit of {1}")]
    TooLarge(usize, usize),
    #[error("unbound fixpoint variable {0}")]
    UnboundFixVar(String),
    #[error("individual variable ?{0} has no value")]
    UnboundVar(String),
    #[error(transparent)]
    Context(#[from] ContextError),
}

type Fix = BTreeMap<String, BTreeSet<StateId>>;

struct Oracle<'a> {
    ts: &'a TransitionSystem,
    cfg: OracleConfig,
    tboxes: HashMap<StateId, TBox>,
    answers: HashMap<(StateId, Ucq), AnswerSet>,
    fixpoints: HashMap<(MuFormula, Valuation, Fix), BTreeSet<StateId>>,
}

impl Oracle<'_> {
    fn tbox(&mut self, s: StateId) -> Result<&TBox, OracleError> {
        if !self.tboxes.contains_key(&s) {
            let st = self.ts.state(s);
            let t = self.ts.ctbox().in_context(self.ts.schema(), &st.ctx)?;
            self.tboxes.insert(s, t);
        }
        Ok(&self.tboxes[&s])
    }

    fn domain(&self, s: StateId) -> Vec<String> {
        let mut d = self.ts.state(s).abox.adom();
        d.remove(MARKER_CONSTANT);
        d.into_iter().collect()
    }

    fn sat(
        &mut self,
        s: StateId,
        f: &MuFormula,
        v: &Valuation,
        fix: &Fix,
    ) -> Result<bool, OracleError> {
        Ok(match f {
            MuFormula::True => true,
            MuFormula::False => false,
            MuFormula::Query(q) => {
                let mut binding = Valuation::new();
                for x in q.free() {
                    let d = v.get(x).ok_or_else(|| OracleError::UnboundVar(x.clone()))?;
                    binding.insert(x.clone(), d.clone());
                }
                let key = (s, q.clone());
                if !self.answers.contains_key(&key) {
                    let tbox = self.tbox(s)?.clone();
                    let ans = certain_answers_ucq(q, &tbox, &self.ts.state(s).abox);
                    self.answers.insert(key.clone(), ans);
                }
                self.answers[&key].contains_binding(&binding)
            }
            MuFormula::Context(a) => {
                let ctx = &self.ts.state(s).ctx;
                self.ts
                    .schema()
                    .entails(ctx, &ContextExpr::Atom(a.clone()))?
            }
            MuFormula::Var(z) => fix
                .get(z)
                .ok_or_else(|| OracleError::UnboundFixVar(z.clone()))?
                .contains(&s),
            MuFormula::Not(a) => !self.sat(s, a, v, fix)?,
            MuFormula::And(a, b) => self.sat(s, a, v, fix)? && self.sat(s, b, v, fix)?,
            MuFormula::Or(a, b) => self.sat(s, a, v, fix)? || self.sat(s, b, v, fix)?,
            MuFormula::Implies(a, b) => !self.sat(s, a, v, fix)? || self.sat(s, b, v, fix)?,
            MuFormula::Exists(x, body) | MuFormula::Forall(x, body) => {
                let existential = matches!(f, MuFormula::Exists(..));
                let mut result = !existential;
                for d in self.domain(s) {
                    let mut v2 = v.clone();
                    v2.insert(x.clone(), d);
                    if self.sat(s, body, &v2, fix)? == existential {
                        result = existential;
                        break;
                    }
                }
                result
            }
            MuFormula::Step(pair, body) => {
                let (first, second) = pair.steps();
                let mut result = !first;
                for &t in self.ts.successors(s) {
                    let mut inner = !second;
                    for &u in self.ts.successors(t) {
                        if self.sat(u, body, v, fix)? == second {
                            inner = second;
                            break;
                        }
                    }
                    if inner == first {
                        result = first;
                        break;
                    }
                }
                result
            }
            MuFormula::Mu(z, body) | MuFormula::Nu(z, body) => {
                let key = (f.clone(), v.clone(), fix.clone());
                if let Some(set) = self.fixpoints.get(&key) {
                    return Ok(set.contains(&s));
                }
                let least = matches!(f, MuFormula::Mu(..));
                let set = self.fixpoint(z, body, least, v, fix)?;
                let member = set.contains(&s);
                self.fixpoints.insert(key, set);
                member
            }
        })
    }

    fn apply(
        &mut self,
        z: &str,
        body: &MuFormula,
        v: &Valuation,
        fix: &Fix,
        arg: BTreeSet<StateId>,
    ) -> Result<BTreeSet<StateId>, OracleError> {
        let mut inner = fix.clone();
        inner.insert(z.to_string(), arg);
        let mut out = BTreeSet::new();
        for s in 0..self.ts.len() {
            if self.sat(s, body, v, &inner)? {
                out.insert(s);
            }
        }
        Ok(out)
    }

    fn fixpoint(
        &mut self,
        z: &str,
        body: &MuFormula,
        least: bool,
        v: &Valuation,
        fix: &Fix,
    ) -> Result<BTreeSet<StateId>, OracleError> {
        let n = self.ts.len();
        let all: BTreeSet<StateId> = (0..n).collect();
        if n <= self.cfg.enumerate_up_to {
            // least: meet of all pre-fixpoints; greatest: join of all post-fixpoints
            let mut acc = if least { all.clone() } else { BTreeSet::new() };
            for mask in 0u64..(1u64 << n) {
                let cand: BTreeSet<StateId> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let img = self.apply(z, body, v, fix, cand.clone())?;
                if least && img.is_subset(&cand) {
                    acc = acc.intersection(&cand).copied().collect();
                } else if !least && cand.is_subset(&img) {
                    acc = acc.union(&cand).copied().collect();
                }
            }
            return Ok(acc);
        }
        // the fixpoint is the complement of the dual fixpoint of
        // S -> complement(f(complement S)), iterated from the other end
        let mut dual = if least { all.clone() } else { BTreeSet::new() };
        loop {
            let arg: BTreeSet<StateId> = all.difference(&dual).copied().collect();
            let img = self.apply(z, body, v, fix, arg)?;
            let next: BTreeSet<StateId> = all.difference(&img).copied().collect();
            if next == dual {
                break;
            }
            dual = next;
        }
        Ok(all.difference(&dual).copied().collect())
    }
}

/// States satisfying `f` under `v`, computed by the reference semantics.
pub fn brute_force_extension(
    ts: &TransitionSystem,
    f: &MuFormula,
    v: &Valuation,
    cfg: OracleConfig,
) -> Result<StateSet, OracleError> {
    if ts.len() > cfg.max_states {
        return Err(OracleError::TooLarge(ts.len(), cfg.max_states));
    }
    let mut o = Oracle {
        ts,
        cfg,
        tboxes: HashMap::new(),
        answers: HashMap::new(),
        fixpoints: HashMap::new(),
    };
    let mut ids = Vec::new();
    for s in 0..ts.len() {
        if o.sat(s, f, v, &Fix::new())? {
            ids.push(s);
        }
    }
    Ok(StateSet::from_ids(ts.len(), ids))
}
