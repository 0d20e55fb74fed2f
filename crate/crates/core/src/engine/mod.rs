//! Single-step execution: action executability, effect application,
//! service-call evaluation, and the action and context transition relations.

mod services;
mod step;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::{ContextExpr, PartialAssignment};
use crate::kb::{Atom, Ecq, Ucq};

pub use services::{HashBackend, ServiceBackend, ServiceError, TableBackend};
pub use step::{
    action_step, apply_theta, calls, context_step, do_action, evaluations, executable,
    rule_bindings, simulate_step, SuccessorSet,
};
pub(crate) use step::{context_step_with, do_with, simulate_pending, successors_of};

/// A term of an effect head.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HeadTerm {
    Var(String),
    Const(String),
    Call(String, Vec<HeadTerm>),
}

impl HeadTerm {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            HeadTerm::Var(v) => vec![v],
            HeadTerm::Const(_) => vec![],
            HeadTerm::Call(_, args) => args.iter().flat_map(HeadTerm::vars).collect(),
        }
    }

    pub fn call_depth(&self) -> usize {
        match self {
            HeadTerm::Call(_, args) => 1 + args.iter().map(HeadTerm::call_depth).max().unwrap_or(0),
            _ => 0,
        }
    }
}

impl fmt::Display for HeadTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadTerm::Var(v) => write!(f, "?{v}"),
            HeadTerm::Const(c) => write!(f, "{c}"),
            HeadTerm::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub type HeadAtom = Atom<HeadTerm>;

/// `q⁺ ∧ Q⁻ ⤳ head`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectSpec {
    pub qplus: Ucq,
    pub qminus: Option<Ecq>,
    pub head: Vec<HeadAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub name: String,
    pub params: Vec<String>,
    pub effects: Vec<EffectSpec>,
}

impl ActionSpec {
    /// Distinct service-call templates across all effect heads.
    pub fn call_templates(&self) -> BTreeSet<&HeadTerm> {
        fn collect<'a>(t: &'a HeadTerm, out: &mut BTreeSet<&'a HeadTerm>) {
            if let HeadTerm::Call(_, args) = t {
                out.insert(t);
                args.iter().for_each(|a| collect(a, out));
            }
        }
        let mut out = BTreeSet::new();
        for e in &self.effects {
            for atom in &e.head {
                atom.args.iter().for_each(|t| collect(t, &mut out));
            }
        }
        out
    }
}

/// `⟨Q(x̄), φ⟩ ↦ α(x̄)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondActionRule {
    pub query: Ecq,
    pub guard: ContextExpr,
    pub action: String,
    pub args: Vec<String>,
}

/// `⟨Q, φ⟩ ↦ C_new`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEvolutionRule {
    pub query: Ecq,
    pub guard: ContextExpr,
    pub head: PartialAssignment,
}

/// A ground term that may still contain service calls.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroundTerm {
    Const(String),
    Call(ServiceCall),
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTerm::Const(c) => write!(f, "{c}"),
            GroundTerm::Call(c) => write!(f, "{c}"),
        }
    }
}

/// A ground service call `f(t1, ..., tn)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ServiceCall {
    pub func: String,
    pub args: Vec<GroundTerm>,
}

impl ServiceCall {
    pub fn new(func: impl Into<String>, args: Vec<GroundTerm>) -> Self {
        ServiceCall {
            func: func.into(),
            args,
        }
    }

    /// A call whose arguments are all constants.
    pub fn with_constants<S: Into<String>>(func: impl Into<String>, args: Vec<S>) -> Self {
        ServiceCall::new(
            func,
            args.into_iter()
                .map(|a| GroundTerm::Const(a.into()))
                .collect(),
        )
    }

    pub fn is_flat(&self) -> bool {
        self.args.iter().all(|a| matches!(a, GroundTerm::Const(_)))
    }

    /// Constant arguments of a flat call.
    pub fn constant_args(&self) -> Vec<&str> {
        self.args
            .iter()
            .filter_map(|a| match a {
                GroundTerm::Const(c) => Some(c.as_str()),
                GroundTerm::Call(_) => None,
            })
            .collect()
    }
}

impl fmt::Display for ServiceCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.func)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

pub type PendingFact = Atom<GroundTerm>;

/// Output of effect application before service results are substituted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PendingFactSet(pub BTreeSet<PendingFact>);

impl PendingFactSet {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PendingFact> {
        self.0.iter()
    }
}

/// Results of service calls issued so far. Functional by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<CallEntry>", from = "Vec<CallEntry>")]
pub struct ServiceCallMap(BTreeMap<ServiceCall, String>);

#[derive(Serialize, Deserialize)]
struct CallEntry {
    call: ServiceCall,
    value: String,
}

impl From<ServiceCallMap> for Vec<CallEntry> {
    fn from(m: ServiceCallMap) -> Self {
        m.0.into_iter()
            .map(|(call, value)| CallEntry { call, value })
            .collect()
    }
}

impl From<Vec<CallEntry>> for ServiceCallMap {
    fn from(v: Vec<CallEntry>) -> Self {
        ServiceCallMap(v.into_iter().map(|e| (e.call, e.value)).collect())
    }
}

impl ServiceCallMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, call: &ServiceCall) -> Option<&str> {
        self.0.get(call).map(String::as_str)
    }

    pub fn contains(&self, call: &ServiceCall) -> bool {
        self.0.contains_key(call)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ServiceCall, &str)> {
        self.0.iter().map(|(c, v)| (c, v.as_str()))
    }

    /// Records a result. Returns `false` (and leaves the map unchanged) if
    /// the call already has a different value.
    pub fn insert(&mut self, call: ServiceCall, value: impl Into<String>) -> bool {
        let value = value.into();
        match self.0.get(&call) {
            Some(v) => *v == value,
            None => {
                self.0.insert(call, value);
                true
            }
        }
    }

    /// `self ∪ other`, or `None` if they disagree on a common call.
    pub fn union(&self, other: &ServiceCallMap) -> Option<ServiceCallMap> {
        let mut out = self.clone();
        for (c, v) in other.iter() {
            if !out.insert(c.clone(), v) {
                return None;
            }
        }
        Some(out)
    }

    /// Whether every entry of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &ServiceCallMap) -> bool {
        self.iter().all(|(c, v)| other.get(c) == Some(v))
    }
}

impl FromIterator<(ServiceCall, String)> for ServiceCallMap {
    fn from_iter<I: IntoIterator<Item = (ServiceCall, String)>>(iter: I) -> Self {
        ServiceCallMap(iter.into_iter().collect())
    }
}

impl fmt::Display for ServiceCallMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(c, v)| format!("{c} -> {v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
