//! DL-Lite knowledge bases: TBox and ABox representation, contextualized
//! TBoxes, UCQ rewriting and certain answers, ECQ evaluation and
//! consistency checking.

mod consistency;
mod eval;
mod rewrite;
mod syntax;

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::context::{ContextError, ContextExpr, ContextSchema, ContextState};

pub use consistency::{find_violation, is_consistent};
pub use eval::{answer_ecq, certain_answers_ucq, ecq_holds, AboxIndex, EcqEvaluator};
pub use rewrite::{rewrite_ucq, HeadedCq, RewrittenUcq};
pub use syntax::{
    ABox, AnswerSet, Atom, BasicConcept, BasicRole, Cq, Ecq, Fact, QueryError, Substitution, TBox,
    TBoxAssertion, Term, Ucq, MARKER_CONCEPT, MARKER_CONSTANT,
};

/// A TBox assertion guarded by a context expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuardedAssertion {
    pub assertion: TBoxAssertion,
    pub guard: ContextExpr,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextualizedTBox {
    pub entries: Vec<GuardedAssertion>,
}

impl ContextualizedTBox {
    pub fn new(entries: Vec<GuardedAssertion>) -> Self {
        ContextualizedTBox { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Concept and role names mentioned anywhere, regardless of guards.
    pub fn vocabulary(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let (mut cs, mut rs) = (BTreeSet::new(), BTreeSet::new());
        for e in &self.entries {
            let (c, r) = e.assertion.names();
            cs.extend(c.into_iter().map(str::to_string));
            rs.extend(r.into_iter().map(str::to_string));
        }
        (cs, rs)
    }

    /// The assertions whose guards are entailed by `ctx`.
    pub fn in_context(
        &self,
        schema: &ContextSchema,
        ctx: &ContextState,
    ) -> Result<TBox, ContextError> {
        let mut out = Vec::new();
        for e in &self.entries {
            if schema.entails(ctx, &e.guard)? {
                out.push(e.assertion.clone());
            }
        }
        Ok(TBox::new(out))
    }
}

/// `T^C` for a contextualized TBox.
pub fn kb_in_context(
    ctbox: &ContextualizedTBox,
    ctx: &ContextState,
    schema: &ContextSchema,
) -> Result<TBox, ContextError> {
    ctbox.in_context(schema, ctx)
}

/// A TBox together with a shared cache of UCQ rewritings over it.
#[derive(Debug)]
pub struct Reasoner {
    tbox: TBox,
    cache: RwLock<HashMap<Ucq, Arc<RewrittenUcq>>>,
}

impl Reasoner {
    pub fn new(tbox: TBox) -> Self {
        Reasoner {
            tbox,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn tbox(&self) -> &TBox {
        &self.tbox
    }

    pub fn rewrite(&self, q: &Ucq) -> Arc<RewrittenUcq> {
        if let Some(r) = self.cache.read().unwrap().get(q) {
            return r.clone();
        }
        let r = Arc::new(rewrite_ucq(q, &self.tbox));
        self.cache
            .write()
            .unwrap()
            .entry(q.clone())
            .or_insert(r)
            .clone()
    }

    pub fn is_consistent(&self, abox: &ABox) -> bool {
        is_consistent(&self.tbox, abox)
    }
}
