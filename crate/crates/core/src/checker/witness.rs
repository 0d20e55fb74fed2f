use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::eval::{CheckError, FixValuation, ModelChecker, Valuation};
use super::formula::MuFormula;
use super::stateset::StateSet;
use crate::statespace::StateId;

const MAX_STEPS: usize = 2000;

/// A path from the initial state that explains a verdict: it leads to the
/// states where the deciding subformulas hold or fail. When `loop_to` is
/// set, the path ends at a state it already visited and continues forever
/// by repeating the cycle from there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub path: Vec<StateId>,
    pub loop_to: Option<StateId>,
    /// Values chosen for quantified variables along the way.
    pub bindings: Vec<(String, String)>,
    pub truncated: bool,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.path.iter().map(|s| format!("s{s}")).collect();
        write!(f, "{}", ids.join(" -> "))?;
        if self.loop_to.is_some() {
            write!(f, " (loop)")?;
        }
        if self.truncated {
            write!(f, " ...")?;
        }
        if !self.bindings.is_empty() {
            let bs: Vec<String> = self
                .bindings
                .iter()
                .map(|(x, d)| format!("?{x}={d}"))
                .collect();
            write!(f, " with {}", bs.join(", "))?;
        }
        Ok(())
    }
}

/// An unfolded fixpoint. Inductive unfoldings (a least fixpoint that holds,
/// a greatest one that fails) carry ranks that decrease along the witness.
#[derive(Clone)]
struct Unfolding<'f> {
    id: usize,
    body: &'f MuFormula,
    v: Valuation,
    env: Env<'f>,
    rank: Option<Vec<usize>>,
}

type Env<'f> = HashMap<String, Unfolding<'f>>;

struct Explainer<'m, 'a> {
    mc: &'m mut ModelChecker<'a>,
    path: Vec<StateId>,
    bindings: Vec<(String, String)>,
    /// Path length when an unfolding was first met at a state.
    visited: HashMap<(usize, StateId, bool), usize>,
    fix: FixValuation,
    loop_to: Option<StateId>,
    truncated: bool,
    next_id: usize,
}

fn mentions_any(f: &MuFormula, vars: &BTreeSet<&String>) -> bool {
    f.free_fix_vars().iter().any(|z| vars.contains(z))
}

fn has_step(f: &MuFormula) -> bool {
    let mut found = false;
    f.visit(&mut |g| found |= matches!(g, MuFormula::Step(..) | MuFormula::Var(_)));
    found
}

/// For each state, the first iterate that decides it: containing it for a
/// least fixpoint, excluding it for a greatest one.
fn ranks(iterates: &[StateSet], least: bool, n: usize) -> Vec<usize> {
    (0..n)
        .map(|s| {
            iterates
                .iter()
                .position(|x| x.contains(s) == least)
                .unwrap_or(usize::MAX)
        })
        .collect()
}

impl<'f> Explainer<'_, '_> {
    fn member(&mut self, f: &MuFormula, v: &Valuation, s: StateId) -> Result<bool, CheckError> {
        Ok(self.mc.extension(f, v, &self.fix)?.contains(s))
    }

    /// A successor of `s` through which the wanted value is realized, when
    /// one successor suffices.
    fn choose(
        &self,
        s: StateId,
        diamond: bool,
        want: bool,
        target: &StateSet,
        env: &Env<'f>,
    ) -> Option<StateId> {
        if diamond != want {
            return None;
        }
        let cands = self
            .mc
            .ts()
            .successors(s)
            .iter()
            .copied()
            .filter(|&t| target.contains(t) == want);
        let innermost = env
            .values()
            .filter(|u| u.rank.is_some())
            .max_by_key(|u| u.id);
        match innermost {
            Some(u) => {
                let rank = u.rank.as_ref().unwrap();
                cands.min_by_key(|&t| (rank[t], t))
            }
            None => cands.min(),
        }
    }

    fn go(
        &mut self,
        s: StateId,
        f: &'f MuFormula,
        want: bool,
        v: &Valuation,
        env: &Env<'f>,
    ) -> Result<(), CheckError> {
        if self.loop_to.is_some() || self.truncated {
            return Ok(());
        }
        if self.path.len() > MAX_STEPS {
            self.truncated = true;
            return Ok(());
        }
        match f {
            MuFormula::True | MuFormula::False | MuFormula::Query(_) | MuFormula::Context(_) => {
                Ok(())
            }
            MuFormula::Not(a) => self.go(s, a, !want, v, env),
            MuFormula::And(a, b) | MuFormula::Or(a, b) | MuFormula::Implies(a, b) => {
                let negate_a = matches!(f, MuFormula::Implies(..));
                // a conjunction is decided by one false child, a
                // disjunction by one true child
                let decisive = !matches!(f, MuFormula::And(..));
                let va = self.member(a, v, s)? != negate_a;
                let vb = self.member(b, v, s)?;
                let mut cands: Vec<(&'f MuFormula, bool)> = Vec::new();
                for (g, val) in [(a.as_ref(), va), (b.as_ref(), vb)] {
                    if want != decisive || val == want {
                        let w = if std::ptr::eq(g, a.as_ref()) {
                            want != negate_a
                        } else {
                            want
                        };
                        cands.push((g, w));
                    }
                }
                let inductive: BTreeSet<&String> = env
                    .iter()
                    .filter(|(_, u)| u.rank.is_some())
                    .map(|(z, _)| z)
                    .collect();
                // one child decides: prefer a local explanation. All children
                // agree: follow the one that moves along the run.
                if want == decisive {
                    cands.sort_by_key(|(g, _)| (mentions_any(g, &inductive), has_step(g)));
                } else {
                    cands.sort_by_key(|(g, _)| !has_step(g));
                }
                match cands.first() {
                    Some(&(g, w)) => self.go(s, g, w, v, env),
                    None => Ok(()),
                }
            }
            MuFormula::Exists(x, body) | MuFormula::Forall(x, body) => {
                // one value decides only a true exists or a false forall
                if matches!(f, MuFormula::Exists(..)) != want {
                    return Ok(());
                }
                for d in self.mc.adom(s).to_vec() {
                    let mut v2 = v.clone();
                    v2.insert(x.clone(), d.clone());
                    if self.member(body, &v2, s)? == want {
                        self.bindings.push((x.clone(), d));
                        return self.go(s, body, want, &v2, env);
                    }
                }
                Ok(())
            }
            MuFormula::Step(pair, body) => {
                let (first, second) = pair.steps();
                let inner = self.mc.extension(body, v, &self.fix)?;
                let mid = self.mc.single_step(second, &inner);
                let Some(t) = self.choose(s, first, want, &mid, env) else {
                    return Ok(());
                };
                self.path.push(t);
                let Some(u) = self.choose(t, second, want, &inner, env) else {
                    return Ok(());
                };
                self.path.push(u);
                self.go(u, body, want, v, env)
            }
            MuFormula::Var(z) => {
                let Some(unf) = env.get(z).cloned() else {
                    return Ok(());
                };
                match self.visited.get(&(unf.id, s, want)) {
                    // unfolding again without a step explains nothing new
                    Some(&len) if len == self.path.len() => return Ok(()),
                    Some(_) => {
                        self.loop_to = Some(s);
                        return Ok(());
                    }
                    None => {
                        self.visited.insert((unf.id, s, want), self.path.len());
                    }
                }
                let mut inner = unf.env.clone();
                inner.insert(z.clone(), unf.clone());
                self.go(s, unf.body, want, &unf.v, &inner)
            }
            MuFormula::Mu(z, body) | MuFormula::Nu(z, body) => {
                let least = matches!(f, MuFormula::Mu(..));
                let (value, iterates) = self.mc.fixpoint(z, body, least, v, &self.fix)?;
                let rank = (least == want).then(|| ranks(&iterates, least, self.mc.ts().len()));
                let id = self.next_id;
                self.next_id += 1;
                let saved = self.fix.insert(z.clone(), value);
                let unf = Unfolding {
                    id,
                    body,
                    v: v.clone(),
                    env: env.clone(),
                    rank,
                };
                let mut inner = env.clone();
                inner.insert(z.clone(), unf);
                self.visited.insert((id, s, want), self.path.len());
                let r = self.go(s, body, want, v, &inner);
                match saved {
                    Some(x) => self.fix.insert(z.clone(), x),
                    None => self.fix.remove(z),
                };
                r
            }
        }
    }
}

/// A path explaining the verdict `holds` of `f` at the initial state, when
/// the verdict depends on some run.
pub(crate) fn explain(
    mc: &mut ModelChecker<'_>,
    f: &MuFormula,
    holds: bool,
) -> Result<Option<Witness>, CheckError> {
    let s0 = mc.ts().initial();
    let mut ex = Explainer {
        mc,
        path: vec![s0],
        bindings: Vec::new(),
        visited: HashMap::new(),
        fix: FixValuation::new(),
        loop_to: None,
        truncated: false,
        next_id: 0,
    };
    ex.go(s0, f, holds, &Valuation::new(), &Env::new())?;
    if ex.path.len() == 1 && ex.loop_to.is_none() {
        return Ok(None);
    }
    Ok(Some(Witness {
        path: ex.path,
        loop_to: ex.loop_to,
        bindings: ex.bindings,
        truncated: ex.truncated,
    }))
}
