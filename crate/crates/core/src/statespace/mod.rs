//! The context-sensitive transition system: construction by alternating
//! action and context transitions, run-bound monitoring, weak acyclicity,
//! and DOT/JSON export.

mod acyclicity;
mod build;
mod export;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::context::{ContextSchema, ContextState};
use crate::engine::ServiceCallMap;
use crate::kb::{ABox, ContextualizedTBox, MARKER_CONSTANT};

pub use acyclicity::{
    check_weak_acyclicity, dependency_graph, AcyclicityReport, DependencyGraph, Position,
};
pub use build::{
    auto_k, build, simulate, spec_digest, threads_from_env, value_domain, BuildConfig, BuildError,
    Mode, RunBoundViolation, TraceStep, THREADS_VAR,
};
pub use export::{ExportFormat, LoadError};

pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Stable,
    Intermediate,
}

/// A node of the transition system. Identity is content: two states with
/// the same ABox, service-call map, context and phase are the same node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemState {
    pub id: StateId,
    /// Hex prefix of a SHA-256 over the state content.
    pub digest: String,
    pub phase: Phase,
    pub ctx: ContextState,
    pub abox: ABox,
    pub scmap: ServiceCallMap,
}

impl SystemState {
    pub fn is_stable(&self) -> bool {
        self.phase == Phase::Stable
    }

    /// Constants of the ABox, without the marker constant.
    pub fn values(&self) -> BTreeSet<String> {
        let mut vals = self.abox.adom();
        vals.remove(MARKER_CONSTANT);
        vals
    }
}

pub(crate) fn content_digest(
    phase: Phase,
    ctx: &ContextState,
    abox: &ABox,
    scmap: &ServiceCallMap,
) -> String {
    let text = serde_json::to_string(&(phase, ctx, abox, scmap)).expect("serializable state");
    hex_prefix(&Sha256::digest(text.as_bytes()), 16)
}

pub(crate) fn hex_prefix(bytes: &[u8], n: usize) -> String {
    let mut s: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    s.truncate(n);
    s
}

/// Why a transition system is only a prefix of the real one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incompleteness {
    pub state_cap: usize,
    /// Stable states that were discovered but not expanded.
    pub unexpanded: Vec<StateId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TsStats {
    pub states: usize,
    pub stable: usize,
    pub intermediate: usize,
    pub edges: usize,
    pub dead_ends: usize,
}

/// A finite transition system over alternating stable and intermediate
/// states, with the contextualized TBox needed to evaluate queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    schema: ContextSchema,
    ctbox: ContextualizedTBox,
    spec_digest: String,
    states: Vec<SystemState>,
    initial: StateId,
    succ: Vec<Vec<StateId>>,
    pred: Vec<Vec<StateId>>,
    labels: BTreeMap<(StateId, StateId), String>,
    incomplete: Option<Incompleteness>,
}

/// Construction input for a hand-made transition system.
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub phase: Phase,
    pub ctx: ContextState,
    pub abox: ABox,
    pub scmap: ServiceCallMap,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TsError {
    #[error("state {0} does not exist")]
    UnknownState(StateId),
    #[error("duplicate state content at {0} and {1}")]
    DuplicateState(StateId, StateId),
}

impl TransitionSystem {
    /// A transition system from explicit states and edges; ids are indices
    /// into `states`.
    pub fn new(
        schema: ContextSchema,
        ctbox: ContextualizedTBox,
        states: Vec<StateSpec>,
        initial: StateId,
        edges: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Result<Self, TsError> {
        let states: Vec<SystemState> = states
            .into_iter()
            .enumerate()
            .map(|(id, s)| SystemState {
                id,
                digest: content_digest(s.phase, &s.ctx, &s.abox, &s.scmap),
                phase: s.phase,
                ctx: s.ctx,
                abox: s.abox,
                scmap: s.scmap,
            })
            .collect();
        let mut seen = BTreeMap::new();
        for s in &states {
            let key = (s.phase, &s.ctx, &s.abox, &s.scmap);
            if let Some(&other) = seen.get(&key) {
                return Err(TsError::DuplicateState(other, s.id));
            }
            seen.insert(key, s.id);
        }
        let mut ts = TransitionSystem::empty(schema, ctbox, String::new(), states, initial)?;
        for (a, b) in edges {
            ts.add_edge(a, b, None)?;
        }
        Ok(ts)
    }

    fn empty(
        schema: ContextSchema,
        ctbox: ContextualizedTBox,
        spec_digest: String,
        states: Vec<SystemState>,
        initial: StateId,
    ) -> Result<Self, TsError> {
        if initial >= states.len() {
            return Err(TsError::UnknownState(initial));
        }
        let n = states.len();
        Ok(TransitionSystem {
            schema,
            ctbox,
            spec_digest,
            states,
            initial,
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
            labels: BTreeMap::new(),
            incomplete: None,
        })
    }

    fn add_edge(&mut self, a: StateId, b: StateId, label: Option<String>) -> Result<(), TsError> {
        for id in [a, b] {
            if id >= self.states.len() {
                return Err(TsError::UnknownState(id));
            }
        }
        if let Err(i) = self.succ[a].binary_search(&b) {
            self.succ[a].insert(i, b);
            let j = self.pred[b].binary_search(&a).unwrap_err();
            self.pred[b].insert(j, a);
        }
        if let Some(l) = label {
            self.labels.entry((a, b)).or_insert(l);
        }
        Ok(())
    }

    pub fn schema(&self) -> &ContextSchema {
        &self.schema
    }

    pub fn ctbox(&self) -> &ContextualizedTBox {
        &self.ctbox
    }

    pub fn spec_digest(&self) -> &str {
        &self.spec_digest
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &SystemState {
        &self.states[id]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn successors(&self, id: StateId) -> &[StateId] {
        &self.succ[id]
    }

    pub fn predecessors(&self, id: StateId) -> &[StateId] {
        &self.pred[id]
    }

    /// All edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// The action instance that produced an action edge, when known.
    pub fn label(&self, a: StateId, b: StateId) -> Option<&str> {
        self.labels.get(&(a, b)).map(String::as_str)
    }

    pub fn is_complete(&self) -> bool {
        self.incomplete.is_none()
    }

    pub fn incompleteness(&self) -> Option<&Incompleteness> {
        self.incomplete.as_ref()
    }

    pub fn find(
        &self,
        phase: Phase,
        ctx: &ContextState,
        abox: &ABox,
        scmap: &ServiceCallMap,
    ) -> Option<StateId> {
        self.states
            .iter()
            .find(|s| s.phase == phase && &s.ctx == ctx && &s.abox == abox && &s.scmap == scmap)
            .map(|s| s.id)
    }

    pub fn stats(&self) -> TsStats {
        let stable = self.states.iter().filter(|s| s.is_stable()).count();
        TsStats {
            states: self.states.len(),
            stable,
            intermediate: self.states.len() - stable,
            edges: self.edge_count(),
            dead_ends: self
                .states
                .iter()
                .filter(|s| s.is_stable() && self.succ[s.id].is_empty())
                .count(),
        }
    }

    /// A shortest path of state ids from the initial state, if reachable.
    pub fn path_to(&self, target: StateId) -> Option<Vec<StateId>> {
        let mut parent = vec![usize::MAX; self.len()];
        let mut queue = std::collections::VecDeque::from([self.initial]);
        parent[self.initial] = self.initial;
        while let Some(s) = queue.pop_front() {
            if s == target {
                let mut path = vec![s];
                let mut cur = s;
                while cur != self.initial {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &t in &self.succ[s] {
                if parent[t] == usize::MAX {
                    parent[t] = s;
                    queue.push_back(t);
                }
            }
        }
        None
    }
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.phase {
            Phase::Stable => "",
            Phase::Intermediate => " (intermediate)",
        };
        writeln!(f, "s{}{tag} {}", self.id, self.ctx)?;
        for fact in self.abox.iter() {
            writeln!(f, "  {fact}")?;
        }
        for (call, v) in self.scmap.iter() {
            writeln!(f, "  {call} = {v}")?;
        }
        Ok(())
    }
}
