use std::collections::BTreeSet;

use super::{
    ActionSpec, CondActionRule, ContextEvolutionRule, GroundTerm, HeadTerm, PendingFact,
    PendingFactSet, ServiceBackend, ServiceCall, ServiceCallMap, ServiceError,
};
use crate::context::{apply_evolution, ContextError, ContextSchema, ContextState};
use crate::kb::{ABox, Atom, EcqEvaluator, Fact, Substitution, TBox};

/// Successors of one action application: post-action ABox and extended
/// service-call map, one per service-result substitution.
pub type SuccessorSet = Vec<(ABox, ServiceCallMap)>;

/// Argument tuples (in the order of `rule.args`) for which the rule's action
/// is executable. Empty when the guard is not entailed.
pub fn rule_bindings(
    rule: &CondActionRule,
    schema: &ContextSchema,
    ctx: &ContextState,
    eval: &mut EcqEvaluator<'_>,
) -> Result<Vec<Vec<String>>, ContextError> {
    if !schema.entails(ctx, &rule.guard)? {
        return Ok(Vec::new());
    }
    let ans = eval.answers(&rule.query);
    let positions: Vec<usize> = rule
        .args
        .iter()
        .map(|a| {
            ans.vars
                .iter()
                .position(|v| v == a)
                .expect("rule arguments are free in its query")
        })
        .collect();
    let tuples: BTreeSet<Vec<String>> = ans
        .tuples
        .iter()
        .map(|t| positions.iter().map(|&i| t[i].clone()).collect())
        .collect();
    Ok(tuples.into_iter().collect())
}

/// Whether `rule` enables its action with `sigma` (keyed by the rule's
/// argument variables) in state `(abox, ctx)`.
pub fn executable(
    abox: &ABox,
    ctx: &ContextState,
    schema: &ContextSchema,
    tbox: &TBox,
    rule: &CondActionRule,
    sigma: &Substitution,
) -> Result<bool, ContextError> {
    if !schema.entails(ctx, &rule.guard)? {
        return Ok(false);
    }
    let mut env = sigma.clone();
    Ok(EcqEvaluator::new(tbox, abox).holds(&rule.query, &mut env))
}

/// Effect application: every head instantiation over the answers of each
/// effect body. `sigma` binds the action parameters.
pub fn do_action(
    tbox: &TBox,
    abox: &ABox,
    action: &ActionSpec,
    sigma: &Substitution,
) -> PendingFactSet {
    do_with(&mut EcqEvaluator::new(tbox, abox), action, sigma)
}

pub(crate) fn do_with(
    eval: &mut EcqEvaluator<'_>,
    action: &ActionSpec,
    sigma: &Substitution,
) -> PendingFactSet {
    let mut out = BTreeSet::new();
    for effect in &action.effects {
        let qplus = effect.qplus.substitute(sigma);
        let qminus = effect.qminus.as_ref().map(|q| q.substitute(sigma));
        let answers = eval.ucq_answers(&qplus).substitutions();
        for rho in answers {
            if let Some(filter) = &qminus {
                let mut env = rho.clone();
                if !eval.holds(filter, &mut env) {
                    continue;
                }
            }
            for atom in &effect.head {
                let args = atom
                    .args
                    .iter()
                    .map(|t| instantiate(t, sigma, &rho))
                    .collect();
                out.insert(Atom::new(atom.pred.clone(), args));
            }
        }
    }
    PendingFactSet(out)
}

fn instantiate(t: &HeadTerm, sigma: &Substitution, rho: &Substitution) -> GroundTerm {
    match t {
        HeadTerm::Const(c) => GroundTerm::Const(c.clone()),
        HeadTerm::Var(v) => GroundTerm::Const(
            rho.get(v)
                .or_else(|| sigma.get(v))
                .unwrap_or_else(|| panic!("head variable ?{v} unbound"))
                .clone(),
        ),
        HeadTerm::Call(f, args) => GroundTerm::Call(ServiceCall::new(
            f.clone(),
            args.iter().map(|a| instantiate(a, sigma, rho)).collect(),
        )),
    }
}

/// Every service call in `p`, innermost first, without repetitions.
pub fn calls(p: &PendingFactSet) -> Vec<ServiceCall> {
    fn walk(t: &GroundTerm, seen: &mut BTreeSet<ServiceCall>, out: &mut Vec<ServiceCall>) {
        if let GroundTerm::Call(c) = t {
            for a in &c.args {
                walk(a, seen, out);
            }
            if seen.insert(c.clone()) {
                out.push(c.clone());
            }
        }
    }
    let (mut seen, mut out) = (BTreeSet::new(), Vec::new());
    for fact in p.iter() {
        for t in &fact.args {
            walk(t, &mut seen, &mut out);
        }
    }
    out
}

/// Replaces calls whose arguments are resolved by their value in `theta`,
/// bottom-up.
fn resolve(t: &GroundTerm, theta: &ServiceCallMap) -> GroundTerm {
    match t {
        GroundTerm::Const(_) => t.clone(),
        GroundTerm::Call(c) => {
            let call = ServiceCall::new(
                c.func.clone(),
                c.args.iter().map(|a| resolve(a, theta)).collect(),
            );
            match theta.get(&call) {
                Some(v) if call.is_flat() => GroundTerm::Const(v.to_string()),
                _ => GroundTerm::Call(call),
            }
        }
    }
}

/// Flat calls (all arguments constant) remaining in `facts`, in order of
/// first occurrence.
fn flat_calls(facts: &[PendingFact], theta: &ServiceCallMap) -> Vec<ServiceCall> {
    let resolved = PendingFactSet(
        facts
            .iter()
            .map(|f| {
                Atom::new(
                    f.pred.clone(),
                    f.args.iter().map(|t| resolve(t, theta)).collect(),
                )
            })
            .collect(),
    );
    calls(&resolved)
        .into_iter()
        .filter(ServiceCall::is_flat)
        .collect()
}

/// All service-result substitutions for `p` over `domain` that agree with
/// `scmap`. A substitution is keyed by flat calls; nested calls are resolved
/// innermost first, so `f(g(a))` contributes `g(a)` and `f(v)` where `v` is
/// the value chosen for `g(a)`. Order: lexicographic over calls (first call
/// varies slowest), then over `domain`.
pub fn evaluations(
    p: &PendingFactSet,
    scmap: &ServiceCallMap,
    domain: &[String],
) -> Vec<ServiceCallMap> {
    let facts: Vec<PendingFact> = p.iter().cloned().collect();
    let mut out = Vec::new();
    extend_round(&facts, scmap, ServiceCallMap::new(), domain, &mut out);
    out
}

fn extend_round(
    facts: &[PendingFact],
    scmap: &ServiceCallMap,
    theta: ServiceCallMap,
    domain: &[String],
    out: &mut Vec<ServiceCallMap>,
) {
    let pending: Vec<ServiceCall> = flat_calls(facts, &theta)
        .into_iter()
        .filter(|c| !theta.contains(c))
        .collect();
    if pending.is_empty() {
        out.push(theta);
        return;
    }
    choose(&pending, 0, facts, scmap, theta, domain, out);
}

fn choose(
    pending: &[ServiceCall],
    i: usize,
    facts: &[PendingFact],
    scmap: &ServiceCallMap,
    theta: ServiceCallMap,
    domain: &[String],
    out: &mut Vec<ServiceCallMap>,
) {
    if i == pending.len() {
        extend_round(facts, scmap, theta, domain, out);
        return;
    }
    let call = &pending[i];
    if let Some(v) = scmap.get(call) {
        let mut next = theta;
        next.insert(call.clone(), v);
        choose(pending, i + 1, facts, scmap, next, domain, out);
        return;
    }
    for v in domain {
        let mut next = theta.clone();
        next.insert(call.clone(), v.clone());
        choose(pending, i + 1, facts, scmap, next, domain, out);
    }
}

/// Substitutes service results into `p`. `None` if some call has no value.
pub fn apply_theta(p: &PendingFactSet, theta: &ServiceCallMap) -> Option<ABox> {
    let mut out = ABox::new();
    for fact in p.iter() {
        let mut args = Vec::with_capacity(fact.args.len());
        for t in &fact.args {
            match resolve(t, theta) {
                GroundTerm::Const(c) => args.push(c),
                GroundTerm::Call(_) => return None,
            }
        }
        out.insert(Fact::new(fact.pred.clone(), args));
    }
    Some(out)
}

/// Action transition: one successor per service-result substitution.
/// Successors are not filtered for consistency.
pub fn action_step(
    tbox: &TBox,
    abox: &ABox,
    scmap: &ServiceCallMap,
    action: &ActionSpec,
    sigma: &Substitution,
    domain: &[String],
) -> SuccessorSet {
    let pending = do_action(tbox, abox, action, sigma);
    successors_of(&pending, scmap, domain)
}

pub(crate) fn successors_of(
    pending: &PendingFactSet,
    scmap: &ServiceCallMap,
    domain: &[String],
) -> SuccessorSet {
    evaluations(pending, scmap, domain)
        .into_iter()
        .map(|theta| {
            let abox = apply_theta(pending, &theta).expect("total substitution");
            let m = scmap.union(&theta).expect("substitution agrees with map");
            (abox, m)
        })
        .collect()
}

/// Action transition with services answered by `backend`; calls already in
/// `scmap` keep their recorded value.
pub fn simulate_step(
    tbox: &TBox,
    abox: &ABox,
    scmap: &ServiceCallMap,
    action: &ActionSpec,
    sigma: &Substitution,
    backend: &dyn ServiceBackend,
) -> Result<(ABox, ServiceCallMap), ServiceError> {
    let pending = do_action(tbox, abox, action, sigma);
    simulate_pending(&pending, scmap, backend)
}

pub(crate) fn simulate_pending(
    pending: &PendingFactSet,
    scmap: &ServiceCallMap,
    backend: &dyn ServiceBackend,
) -> Result<(ABox, ServiceCallMap), ServiceError> {
    let facts: Vec<PendingFact> = pending.iter().cloned().collect();
    let mut theta = ServiceCallMap::new();
    loop {
        let open: Vec<ServiceCall> = flat_calls(&facts, &theta)
            .into_iter()
            .filter(|c| !theta.contains(c))
            .collect();
        if open.is_empty() {
            break;
        }
        for call in open {
            let value = match scmap.get(&call) {
                Some(v) => v.to_string(),
                None => backend.call(&call.func, &call.constant_args())?,
            };
            theta.insert(call, value);
        }
    }
    let abox = apply_theta(pending, &theta).expect("all calls resolved");
    let m = scmap.union(&theta).expect("recorded values reused");
    Ok((abox, m))
}

/// Context transition: the contexts produced by every firing rule. The
/// marker fact, if present, is ignored.
pub fn context_step(
    abox: &ABox,
    ctx: &ContextState,
    rules: &[ContextEvolutionRule],
    schema: &ContextSchema,
    tbox: &TBox,
) -> Result<BTreeSet<ContextState>, ContextError> {
    let stripped;
    let abox = if abox.has_marker() {
        stripped = abox.without_marker();
        &stripped
    } else {
        abox
    };
    context_step_with(&mut EcqEvaluator::new(tbox, abox), ctx, rules, schema)
}

pub(crate) fn context_step_with(
    eval: &mut EcqEvaluator<'_>,
    ctx: &ContextState,
    rules: &[ContextEvolutionRule],
    schema: &ContextSchema,
) -> Result<BTreeSet<ContextState>, ContextError> {
    let mut out = BTreeSet::new();
    for rule in rules {
        if schema.entails(ctx, &rule.guard)? && eval.holds(&rule.query, &mut Substitution::new()) {
            out.insert(apply_evolution(ctx, &rule.head));
        }
    }
    Ok(out)
}
