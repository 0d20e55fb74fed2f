use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{
    content_digest, hex_prefix, Incompleteness, Phase, StateId, SystemState, TransitionSystem,
};
use crate::context::{ContextError, ContextState};
use crate::dsl::{print_spec, CkabSpec};
use crate::engine::{
    context_step_with, do_with, rule_bindings, simulate_pending, successors_of, ServiceBackend,
    ServiceCallMap, ServiceError,
};
use crate::kb::{ABox, EcqEvaluator, Fact, Reasoner, Substitution, MARKER_CONSTANT};

pub const THREADS_VAR: &str = "CKAB_THREADS";

/// How service calls get their values.
#[derive(Clone, Default)]
pub enum Mode {
    /// Every value of the abstract domain, one successor each.
    #[default]
    Verify,
    /// One value per call, from a backend.
    Simulate(Arc<dyn ServiceBackend>),
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Verify => f.write_str("Verify"),
            Mode::Simulate(_) => f.write_str("Simulate"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    /// Number of fresh abstract values; derived from the actions when unset.
    pub k: Option<usize>,
    pub state_cap: usize,
    /// Runs whose cumulative active domain reaches this size are reported.
    pub bound: Option<usize>,
    pub mode: Mode,
    /// Worker threads; falls back to `CKAB_THREADS`, then to all cores.
    pub threads: Option<usize>,
    /// Constants mentioned by properties, added to the value domain.
    pub extra_constants: BTreeSet<String>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            k: None,
            state_cap: 100_000,
            bound: None,
            mode: Mode::Verify,
            threads: None,
            extra_constants: BTreeSet::new(),
        }
    }
}

/// The thread count requested through the environment.
pub fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_VAR} must be a positive integer, got `{v}`"
            )),
        },
    }
}

/// A run prefix whose cumulative active domain reached the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunBoundViolation {
    pub bound: usize,
    pub values: BTreeSet<String>,
    pub path: Vec<SystemState>,
}

impl fmt::Display for RunBoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.path.iter().map(|s| format!("s{}", s.id)).collect();
        write!(
            f,
            "run bound {} reached: {} distinct values along {}",
            self.bound,
            self.values.len(),
            ids.join(" -> ")
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("initial ABox is inconsistent in the initial context")]
    InconsistentInitialState,
    #[error("{0}")]
    RunBound(Box<RunBoundViolation>),
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

/// SHA-256 of the canonical printing of `spec`.
pub fn spec_digest(spec: &CkabSpec) -> String {
    hex_prefix(&Sha256::digest(print_spec(spec).as_bytes()), 64)
}

/// The largest number of distinct service-call terms in one action.
pub fn auto_k(spec: &CkabSpec) -> usize {
    spec.actions
        .iter()
        .map(|a| a.call_templates().len())
        .max()
        .unwrap_or(0)
}

/// Values service calls may return: the initial active domain, declared
/// and extra constants, then `#1..#k`.
pub fn value_domain(spec: &CkabSpec, k: usize, extra: &BTreeSet<String>) -> Vec<String> {
    let mut known = spec.initial_adom();
    known.extend(spec.constants.iter().cloned());
    known.extend(extra.iter().cloned());
    let mut out: Vec<String> = known.into_iter().collect();
    out.extend((1..=k).map(|i| format!("#{i}")));
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Content {
    phase: Phase,
    ctx: ContextState,
    abox: ABox,
    scmap: ServiceCallMap,
}

struct Branch {
    label: String,
    inter: Content,
    targets: Vec<Content>,
}

struct Explorer<'a> {
    spec: &'a CkabSpec,
    domain: Vec<String>,
    mode: Mode,
    reasoners: Mutex<HashMap<ContextState, Arc<Reasoner>>>,
}

fn sorted_adom(abox: &ABox) -> Vec<String> {
    let mut v = abox.adom();
    v.remove(MARKER_CONSTANT);
    v.into_iter().collect()
}

impl Explorer<'_> {
    fn reasoner(&self, ctx: &ContextState) -> Result<Arc<Reasoner>, ContextError> {
        if let Some(r) = self.reasoners.lock().unwrap().get(ctx) {
            return Ok(r.clone());
        }
        let tbox = self.spec.ctbox.in_context(&self.spec.schema, ctx)?;
        let r = Arc::new(Reasoner::new(tbox));
        Ok(self
            .reasoners
            .lock()
            .unwrap()
            .entry(ctx.clone())
            .or_insert(r)
            .clone())
    }

    fn expand(&self, s: &Content) -> Result<Vec<Branch>, BuildError> {
        let spec = self.spec;
        let reasoner = self.reasoner(&s.ctx)?;
        let mut eval = EcqEvaluator::with_reasoner(&reasoner, &s.abox, sorted_adom(&s.abox));
        let mut branches = Vec::new();
        for rule in &spec.process {
            let action = spec.action(&rule.action).expect("validated action name");
            for tuple in rule_bindings(rule, &spec.schema, &s.ctx, &mut eval)? {
                let sigma: Substitution = action
                    .params
                    .iter()
                    .cloned()
                    .zip(tuple.iter().cloned())
                    .collect();
                let label = format!("{}({})", action.name, tuple.join(", "));
                let pending = do_with(&mut eval, action, &sigma);
                let results = match &self.mode {
                    Mode::Verify => successors_of(&pending, &s.scmap, &self.domain),
                    Mode::Simulate(backend) => {
                        vec![simulate_pending(&pending, &s.scmap, backend.as_ref())?]
                    }
                };
                for (abox, scmap) in results {
                    let targets = self.context_successors(&reasoner, &abox, &scmap, &s.ctx)?;
                    if targets.is_empty() {
                        continue;
                    }
                    let mut marked = abox;
                    marked.insert(Fact::marker());
                    branches.push(Branch {
                        label: label.clone(),
                        inter: Content {
                            phase: Phase::Intermediate,
                            ctx: s.ctx.clone(),
                            abox: marked,
                            scmap,
                        },
                        targets,
                    });
                }
            }
        }
        Ok(branches)
    }

    fn context_successors(
        &self,
        reasoner: &Reasoner,
        abox: &ABox,
        scmap: &ServiceCallMap,
        ctx: &ContextState,
    ) -> Result<Vec<Content>, BuildError> {
        let mut eval = EcqEvaluator::with_reasoner(reasoner, abox, sorted_adom(abox));
        let ctxs = context_step_with(&mut eval, ctx, &self.spec.context_rules, &self.spec.schema)?;
        let mut out = Vec::new();
        for c in ctxs {
            if self.reasoner(&c)?.is_consistent(abox) {
                out.push(Content {
                    phase: Phase::Stable,
                    ctx: c,
                    abox: abox.clone(),
                    scmap: scmap.clone(),
                });
            }
        }
        Ok(out)
    }
}

/// Cumulative value sets propagated along edges; an upper envelope of the
/// active domain accumulated by any run reaching each state.
struct Envelope {
    bound: usize,
    interner: HashMap<String, u32>,
    own: Vec<BTreeSet<u32>>,
    acc: Vec<BTreeSet<u32>>,
}

impl Envelope {
    fn new(bound: usize) -> Self {
        Envelope {
            bound,
            interner: HashMap::new(),
            own: Vec::new(),
            acc: Vec::new(),
        }
    }

    fn add_state(&mut self, s: &SystemState) -> bool {
        let mut own = BTreeSet::new();
        for v in s.values() {
            let n = self.interner.len() as u32;
            own.insert(*self.interner.entry(v).or_insert(n));
        }
        self.acc.push(own.clone());
        self.own.push(own);
        self.acc[s.id].len() >= self.bound
    }

    /// Joins along a new edge; returns a state whose envelope reached the
    /// bound, if any.
    fn join(&mut self, from: StateId, to: StateId, succ: &[Vec<StateId>]) -> Option<StateId> {
        let mut work = vec![(from, to)];
        while let Some((a, b)) = work.pop() {
            let before = self.acc[b].len();
            let incoming: Vec<u32> = self.acc[a].iter().copied().collect();
            self.acc[b].extend(incoming);
            if self.acc[b].len() > before {
                if self.acc[b].len() >= self.bound {
                    return Some(b);
                }
                work.extend(succ[b].iter().map(|&c| (b, c)));
            }
        }
        None
    }

    fn values(&self, id: StateId) -> BTreeSet<String> {
        let names: HashMap<u32, &String> = self.interner.iter().map(|(k, &v)| (v, k)).collect();
        self.acc[id].iter().map(|i| names[i].clone()).collect()
    }
}

struct Store {
    ts: TransitionSystem,
    index: HashMap<Content, StateId>,
    envelope: Option<Envelope>,
    parent: Vec<StateId>,
}

enum Interned {
    New(StateId),
    Known(StateId),
    Full,
}

impl Store {
    fn intern(&mut self, c: Content, cap: usize, parent: StateId) -> Result<Interned, BuildError> {
        if let Some(&id) = self.index.get(&c) {
            return Ok(Interned::Known(id));
        }
        if self.ts.states.len() >= cap {
            return Ok(Interned::Full);
        }
        let id = self.ts.states.len();
        let state = SystemState {
            id,
            digest: content_digest(c.phase, &c.ctx, &c.abox, &c.scmap),
            phase: c.phase,
            ctx: c.ctx.clone(),
            abox: c.abox.clone(),
            scmap: c.scmap.clone(),
        };
        self.index.insert(c, id);
        self.ts.succ.push(Vec::new());
        self.ts.pred.push(Vec::new());
        self.parent.push(parent);
        let reached = match &mut self.envelope {
            Some(env) => env.add_state(&state),
            None => false,
        };
        self.ts.states.push(state);
        if reached {
            return Err(self.violation(id));
        }
        Ok(Interned::New(id))
    }

    fn edge(&mut self, a: StateId, b: StateId, label: Option<String>) -> Result<(), BuildError> {
        self.ts.add_edge(a, b, label).expect("interned states");
        if let Some(env) = &mut self.envelope {
            if let Some(hit) = env.join(a, b, &self.ts.succ) {
                return Err(self.violation(hit));
            }
        }
        Ok(())
    }

    fn violation(&self, id: StateId) -> BuildError {
        let env = self.envelope.as_ref().expect("monitor enabled");
        let mut path = vec![id];
        let mut cur = id;
        while self.parent[cur] != cur {
            cur = self.parent[cur];
            path.push(cur);
        }
        path.reverse();
        BuildError::RunBound(Box::new(RunBoundViolation {
            bound: env.bound,
            values: env.values(id),
            path: path.iter().map(|&i| self.ts.states[i].clone()).collect(),
        }))
    }
}

/// Builds the transition system of `spec` by breadth-first exploration.
/// The result, including state numbering, does not depend on the number
/// of threads.
pub fn build(spec: &CkabSpec, config: &BuildConfig) -> Result<TransitionSystem, BuildError> {
    let threads = match config.threads {
        Some(n) => Some(n),
        None => threads_from_env().ok().flatten(),
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BuildError::Threads(e.to_string()))?
            .install(|| build_in_pool(spec, config)),
        None => build_in_pool(spec, config),
    }
}

fn build_in_pool(spec: &CkabSpec, config: &BuildConfig) -> Result<TransitionSystem, BuildError> {
    let k = config.k.unwrap_or_else(|| auto_k(spec));
    let explorer = Explorer {
        spec,
        domain: value_domain(spec, k, &config.extra_constants),
        mode: config.mode.clone(),
        reasoners: Mutex::new(HashMap::new()),
    };
    let s0 = Content {
        phase: Phase::Stable,
        ctx: spec.initial_context.clone(),
        abox: spec.initial_abox.clone(),
        scmap: ServiceCallMap::new(),
    };
    if !explorer.reasoner(&s0.ctx)?.is_consistent(&s0.abox) {
        return Err(BuildError::InconsistentInitialState);
    }
    let digest = spec_digest(spec);
    let mut store = Store {
        ts: TransitionSystem {
            schema: spec.schema.clone(),
            ctbox: spec.ctbox.clone(),
            spec_digest: digest,
            states: Vec::new(),
            initial: 0,
            succ: Vec::new(),
            pred: Vec::new(),
            labels: Default::default(),
            incomplete: None,
        },
        index: HashMap::new(),
        envelope: config.bound.map(Envelope::new),
        parent: Vec::new(),
    };
    let cap = config.state_cap.max(1);
    let mut frontier = match store.intern(s0, cap, 0)? {
        Interned::New(id) => vec![id],
        _ => unreachable!("first state"),
    };
    let mut full = false;
    while !frontier.is_empty() {
        let contents: Vec<Content> = frontier
            .iter()
            .map(|&id| {
                let s = &store.ts.states[id];
                Content {
                    phase: s.phase,
                    ctx: s.ctx.clone(),
                    abox: s.abox.clone(),
                    scmap: s.scmap.clone(),
                }
            })
            .collect();
        let expansions: Vec<Result<Vec<Branch>, BuildError>> =
            contents.par_iter().map(|c| explorer.expand(c)).collect();
        let mut next = Vec::new();
        let mut done = 0;
        'merge: for (&src, branches) in frontier.iter().zip(expansions) {
            for b in branches? {
                let inter = match store.intern(b.inter, cap, src)? {
                    Interned::Full => {
                        full = true;
                        break 'merge;
                    }
                    Interned::Known(id) => {
                        store.edge(src, id, Some(b.label))?;
                        continue;
                    }
                    Interned::New(id) => id,
                };
                store.edge(src, inter, Some(b.label))?;
                for t in b.targets {
                    let target = match store.intern(t, cap, inter)? {
                        Interned::Full => {
                            full = true;
                            break 'merge;
                        }
                        Interned::Known(id) => id,
                        Interned::New(id) => {
                            next.push(id);
                            id
                        }
                    };
                    store.edge(inter, target, None)?;
                }
            }
            done += 1;
        }
        if full {
            let mut unexpanded: Vec<StateId> = frontier[done..].to_vec();
            unexpanded.extend(next);
            unexpanded.sort_unstable();
            store.ts.incomplete = Some(Incompleteness {
                state_cap: cap,
                unexpanded,
            });
            break;
        }
        frontier = next;
    }
    Ok(store.ts)
}

/// One stable configuration of a simulated run and the action that led to
/// it.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TraceStep {
    pub action: Option<String>,
    pub ctx: ContextState,
    pub abox: ABox,
    pub scmap: ServiceCallMap,
}

/// A single run of at most `steps` action and context step pairs, with
/// services answered by `backend`. Where several actions or contexts are
/// possible, a generator seeded with `seed` picks one. The run stops early
/// at a dead end.
pub fn simulate(
    spec: &CkabSpec,
    backend: Arc<dyn ServiceBackend>,
    steps: usize,
    seed: u64,
) -> Result<Vec<TraceStep>, BuildError> {
    use rand::{Rng, SeedableRng};

    let explorer = Explorer {
        spec,
        domain: Vec::new(),
        mode: Mode::Simulate(backend),
        reasoners: Mutex::new(HashMap::new()),
    };
    let mut cur = Content {
        phase: Phase::Stable,
        ctx: spec.initial_context.clone(),
        abox: spec.initial_abox.clone(),
        scmap: ServiceCallMap::new(),
    };
    if !explorer.reasoner(&cur.ctx)?.is_consistent(&cur.abox) {
        return Err(BuildError::InconsistentInitialState);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut trace = vec![TraceStep {
        action: None,
        ctx: cur.ctx.clone(),
        abox: cur.abox.clone(),
        scmap: cur.scmap.clone(),
    }];
    for _ in 0..steps {
        let options: Vec<(String, Content)> = explorer
            .expand(&cur)?
            .into_iter()
            .flat_map(|b| {
                let label = b.label;
                b.targets.into_iter().map(move |t| (label.clone(), t))
            })
            .collect();
        if options.is_empty() {
            break;
        }
        let (label, next) = options[rng.random_range(0..options.len())].clone();
        trace.push(TraceStep {
            action: Some(label),
            ctx: next.ctx.clone(),
            abox: next.abox.clone(),
            scmap: next.scmap.clone(),
        });
        cur = next;
    }
    Ok(trace)
}
