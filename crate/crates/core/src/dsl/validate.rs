use std::collections::{BTreeMap, BTreeSet};

use super::diag::{Diagnostic, Pos};
use super::CkabSpec;
use crate::checker::MuFormula;
use crate::engine::HeadTerm;
use crate::kb::{find_violation, Ecq, Fact, Term, Ucq, MARKER_CONCEPT, MARKER_CONSTANT};

/// Source positions of specification items, used to place diagnostics.
/// Missing entries fall back to the start of the document.
#[derive(Debug, Clone, Default)]
pub struct SpecSpans {
    pub dimensions: Pos,
    pub init_context: Pos,
    pub declarations: BTreeMap<String, Pos>,
    pub tbox: Vec<Pos>,
    pub abox: BTreeMap<Fact, Pos>,
    pub actions: Vec<Pos>,
    pub effects: Vec<Vec<Pos>>,
    pub process: Vec<Pos>,
    pub context_rules: Vec<Pos>,
}

impl SpecSpans {
    fn at<T: Copy + Default>(v: &[T], i: usize) -> T {
        v.get(i).copied().unwrap_or_default()
    }

    fn effect(&self, a: usize, e: usize) -> Pos {
        self.effects
            .get(a)
            .and_then(|v| v.get(e))
            .copied()
            .unwrap_or_else(|| Self::at(&self.actions, a))
    }
}

/// Checks a specification built programmatically.
pub fn validate_spec(spec: &CkabSpec) -> Vec<Diagnostic> {
    validate_with_spans(spec, &SpecSpans::default())
}

fn ucq_atoms(q: &Ucq) -> impl Iterator<Item = (&str, &[Term])> {
    q.disjuncts()
        .iter()
        .flat_map(|d| d.atoms.iter().map(|a| (a.pred.as_str(), a.args.as_slice())))
}

fn ecq_atoms(q: &Ecq) -> Vec<(&str, &[Term])> {
    q.ucqs().into_iter().flat_map(ucq_atoms).collect()
}

fn head_vars(t: &HeadTerm, out: &mut BTreeSet<String>) {
    match t {
        HeadTerm::Var(v) => {
            out.insert(v.clone());
        }
        HeadTerm::Const(_) => {}
        HeadTerm::Call(_, args) => args.iter().for_each(|a| head_vars(a, out)),
    }
}

fn head_consts<'a>(t: &'a HeadTerm, out: &mut Vec<&'a str>) {
    match t {
        HeadTerm::Var(_) => {}
        HeadTerm::Const(c) => out.push(c),
        HeadTerm::Call(_, args) => args.iter().for_each(|a| head_consts(a, out)),
    }
}

fn head_calls<'a>(t: &'a HeadTerm, out: &mut Vec<&'a HeadTerm>) {
    if let HeadTerm::Call(_, args) = t {
        out.push(t);
        args.iter().for_each(|a| head_calls(a, out));
    }
}

struct Checker {
    concepts: BTreeSet<String>,
    roles: BTreeSet<String>,
    known_constants: BTreeSet<String>,
    diags: Vec<Diagnostic>,
}

impl Checker {
    fn error(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(pos, msg));
    }

    fn warning(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.push(Diagnostic::warning(pos, msg));
    }

    fn predicate(&mut self, pos: Pos, pred: &str, arity: usize) {
        if pred == MARKER_CONCEPT {
            self.error(pos, format!("`{pred}` is a reserved name"));
            return;
        }
        let is_concept = self.concepts.contains(pred);
        let is_role = self.roles.contains(pred);
        match (arity, is_concept, is_role) {
            (1, true, _) | (2, _, true) => {}
            (1, false, true) => self.error(pos, format!("role `{pred}` used with 1 argument")),
            (2, true, false) => self.error(pos, format!("concept `{pred}` used with 2 arguments")),
            (1, false, false) => self.error(pos, format!("undeclared concept `{pred}`")),
            (2, false, false) => self.error(pos, format!("undeclared role `{pred}`")),
            (n, _, _) => self.error(
                pos,
                format!("`{pred}` used with {n} arguments; predicates are unary or binary"),
            ),
        }
    }

    fn constant(&mut self, pos: Pos, c: &str) {
        if c == MARKER_CONSTANT {
            self.error(pos, format!("`{c}` is a reserved name"));
        }
    }

    fn query_constants(&mut self, pos: Pos, atoms: &[(&str, &[Term])]) {
        for (_, args) in atoms {
            for t in args.iter() {
                if let Term::Const(c) = t {
                    self.constant(pos, c);
                    if !self.known_constants.contains(c) && c != MARKER_CONSTANT {
                        self.warning(
                            pos,
                            format!("constant `{c}` is neither in the initial ABox nor declared"),
                        );
                    }
                }
            }
        }
    }

    fn query(&mut self, pos: Pos, q: &Ecq) {
        let atoms = ecq_atoms(q);
        for (pred, args) in &atoms {
            self.predicate(pos, pred, args.len());
        }
        self.query_constants(pos, &atoms);
    }
}

/// Semantic checks on a built specification.
pub(crate) fn validate_with_spans(spec: &CkabSpec, spans: &SpecSpans) -> Vec<Diagnostic> {
    let (concepts, roles) = spec.vocabulary();
    let adom0 = spec.initial_adom();
    let mut known_constants = adom0.clone();
    known_constants.extend(spec.constants.iter().cloned());
    let mut ck = Checker {
        concepts,
        roles,
        known_constants,
        diags: Vec::new(),
    };

    // vocabulary
    for name in ck
        .concepts
        .intersection(&ck.roles)
        .cloned()
        .collect::<Vec<_>>()
    {
        let pos = spans.declarations.get(&name).copied().unwrap_or_default();
        ck.error(
            pos,
            format!("`{name}` is used both as a concept and as a role"),
        );
    }
    for name in ck
        .concepts
        .iter()
        .chain(&ck.roles)
        .cloned()
        .collect::<Vec<_>>()
    {
        if name == MARKER_CONCEPT {
            let pos = spans.declarations.get(&name).copied().unwrap_or_default();
            ck.error(pos, format!("`{name}` is a reserved name"));
        }
    }
    for c in spec.constants.clone() {
        let pos = spans.declarations.get(&c).copied().unwrap_or_default();
        ck.constant(pos, &c);
    }
    for s in spec.services.keys() {
        if s == MARKER_CONCEPT || s == MARKER_CONSTANT {
            let pos = spans.declarations.get(s).copied().unwrap_or_default();
            ck.error(pos, format!("`{s}` is a reserved name"));
        }
    }
    // guards
    for (i, e) in spec.ctbox.entries.iter().enumerate() {
        let pos = SpecSpans::at(&spans.tbox, i);
        if let Err(err) = spec.schema.check_expr(&e.guard) {
            ck.error(pos, err.to_string());
        }
    }

    // role inclusions into functional roles are outside DL-Lite_A
    let functional: BTreeSet<&str> = spec
        .ctbox
        .entries
        .iter()
        .filter_map(|e| match &e.assertion {
            crate::kb::TBoxAssertion::Funct(r) => Some(r.name.as_str()),
            _ => None,
        })
        .collect();
    for (i, e) in spec.ctbox.entries.iter().enumerate() {
        if let crate::kb::TBoxAssertion::RoleIncl(_, r2) = &e.assertion {
            if functional.contains(r2.name.as_str()) {
                let pos = SpecSpans::at(&spans.tbox, i);
                ck.warning(
                    pos,
                    format!(
                        "functional role `{}` is specialized by a role inclusion; reasoning may be incomplete",
                        r2.name
                    ),
                );
            }
        }
    }

    // abox
    for f in spec.initial_abox.iter() {
        let pos = spans.abox.get(f).copied().unwrap_or_default();
        ck.predicate(pos, &f.pred, f.args.len());
        for c in &f.args {
            ck.constant(pos, c);
        }
    }

    // initial context
    for d in spec.schema.dimensions() {
        match spec.initial_context.get(d.name()) {
            Some(v) if d.contains(v) => {}
            Some(v) => ck.error(
                spans.init_context,
                format!("unknown value {v} for dimension {}", d.name()),
            ),
            None => ck.error(
                spans.init_context,
                format!("init-context does not assign dimension {}", d.name()),
            ),
        }
    }

    // actions
    let mut action_names = BTreeSet::new();
    for (ai, action) in spec.actions.iter().enumerate() {
        let apos = SpecSpans::at(&spans.actions, ai);
        if !action_names.insert(action.name.as_str()) {
            ck.error(apos, format!("duplicate action `{}`", action.name));
        }
        let mut params = BTreeSet::new();
        for p in &action.params {
            if !params.insert(p.clone()) {
                ck.error(
                    apos,
                    format!("duplicate parameter ?{p} of `{}`", action.name),
                );
            }
        }
        for (ei, effect) in action.effects.iter().enumerate() {
            let pos = spans.effect(ai, ei);
            let plus = Ecq::Ucq(effect.qplus.clone());
            ck.query(pos, &plus);
            let mut bound: BTreeSet<String> = effect.qplus.free().iter().cloned().collect();
            bound.extend(params.iter().cloned());
            if let Some(minus) = &effect.qminus {
                ck.query(pos, minus);
                for v in minus.free_vars() {
                    if !bound.contains(&v) {
                        ck.error(
                            pos,
                            format!(
                                "filter variable ?{v} does not occur free in the positive query"
                            ),
                        );
                    }
                }
            }
            for atom in &effect.head {
                ck.predicate(pos, &atom.pred, atom.args.len());
                let mut vars = BTreeSet::new();
                let mut consts = Vec::new();
                let mut calls = Vec::new();
                for t in &atom.args {
                    head_vars(t, &mut vars);
                    head_consts(t, &mut consts);
                    head_calls(t, &mut calls);
                }
                for v in vars {
                    if !bound.contains(&v) {
                        ck.error(
                            pos,
                            format!(
                                "head variable ?{v} is neither a parameter nor free in the positive query"
                            ),
                        );
                    }
                }
                for c in consts {
                    ck.constant(pos, c);
                    if !adom0.contains(c) {
                        ck.error(
                            pos,
                            format!("head constant `{c}` is not in the initial ABox"),
                        );
                    }
                }
                for call in calls {
                    let HeadTerm::Call(f, args) = call else {
                        continue;
                    };
                    match spec.services.get(f) {
                        None => ck.error(pos, format!("undeclared service `{f}`")),
                        Some(&n) if n != args.len() => ck.error(
                            pos,
                            format!("service `{f}` expects {n} arguments, found {}", args.len()),
                        ),
                        _ => {}
                    }
                    if call.call_depth() > 1 {
                        ck.warning(pos, format!("nested service call `{call}`"));
                    }
                }
            }
        }
    }

    // condition-action rules
    for (i, rule) in spec.process.iter().enumerate() {
        let pos = SpecSpans::at(&spans.process, i);
        ck.query(pos, &rule.query);
        match spec.action(&rule.action) {
            None => ck.error(pos, format!("unknown action `{}`", rule.action)),
            Some(a) if a.params.len() != rule.args.len() => ck.error(
                pos,
                format!(
                    "action `{}` takes {} arguments, found {}",
                    a.name,
                    a.params.len(),
                    rule.args.len()
                ),
            ),
            _ => {}
        }
        let args: BTreeSet<String> = rule.args.iter().cloned().collect();
        if args.len() != rule.args.len() {
            ck.error(pos, "action arguments must be distinct variables");
        }
        let free = rule.query.free_vars();
        if free != args {
            let show = |s: &BTreeSet<String>| {
                s.iter()
                    .map(|v| format!("?{v}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            ck.error(
                pos,
                format!(
                    "free variables of the rule query ({}) must be exactly the action arguments ({})",
                    show(&free),
                    show(&args)
                ),
            );
        }
    }

    // context-evolution rules
    for (i, rule) in spec.context_rules.iter().enumerate() {
        let pos = SpecSpans::at(&spans.context_rules, i);
        ck.query(pos, &rule.query);
        let free = rule.query.free_vars();
        if !free.is_empty() {
            ck.error(pos, "the query of a context-evolution rule must be boolean");
        }
        if let Err(err) = spec.schema.check_expr(&rule.guard) {
            ck.error(pos, err.to_string());
        }
        for (d, v) in rule.head.iter() {
            if let Err(err) = spec
                .schema
                .check_atom(&crate::context::ContextAtom::new(d, v))
            {
                ck.error(pos, err.to_string());
            } else if spec.schema.dimension(d).is_some_and(|dom| !dom.is_leaf(v)) {
                ck.warning(pos, format!("context rule assigns non-leaf value {d}:{v}"));
            }
        }
    }
    for (i, rule) in spec.process.iter().enumerate() {
        if let Err(err) = spec.schema.check_expr(&rule.guard) {
            let pos = SpecSpans::at(&spans.process, i);
            ck.error(pos, err.to_string());
        }
    }

    // initial consistency, only meaningful once names check out
    if !ck.diags.iter().any(Diagnostic::is_error) {
        match spec.ctbox.in_context(&spec.schema, &spec.initial_context) {
            Ok(tbox) => {
                if let Some(v) = find_violation(&tbox, &spec.initial_abox) {
                    ck.error(
                        spans.init_context,
                        format!(
                            "the initial ABox is inconsistent with the TBox of the initial context: violates `{v}`"
                        ),
                    );
                }
            }
            Err(err) => ck.error(spans.init_context, err.to_string()),
        }
    }
    ck.diags
}

/// Structural checks on a property: closed, monotone fixpoints.
pub fn check_formula(f: &MuFormula, pos: Pos) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for z in f.free_fix_vars() {
        out.push(Diagnostic::error(
            pos,
            format!("unbound fixpoint variable {z}"),
        ));
    }
    for x in f.free_vars() {
        out.push(Diagnostic::error(
            pos,
            format!("free individual variable ?{x} is not bound by exists or forall"),
        ));
    }
    f.visit(&mut |g| {
        if let MuFormula::Mu(z, body) | MuFormula::Nu(z, body) = g {
            if !body.is_positive_in(z) {
                out.push(Diagnostic::error(
                    pos,
                    format!("fixpoint body is not monotone: {z} occurs under an odd number of negations"),
                ));
            }
        }
    });
    out
}

/// Checks a property against the vocabulary and context dimensions of a
/// specification.
pub fn validate_property(spec: &CkabSpec, f: &MuFormula, pos: Pos) -> Vec<Diagnostic> {
    let (concepts, roles) = spec.vocabulary();
    let mut known_constants = spec.initial_adom();
    known_constants.extend(spec.constants.iter().cloned());
    let mut ck = Checker {
        concepts,
        roles,
        known_constants,
        diags: Vec::new(),
    };
    f.visit(&mut |g| match g {
        MuFormula::Query(u) => {
            let atoms: Vec<_> = ucq_atoms(u).collect();
            for (pred, args) in &atoms {
                ck.predicate(pos, pred, args.len());
            }
            ck.query_constants(pos, &atoms);
        }
        MuFormula::Context(a) => {
            if let Err(e) = spec.schema.check_atom(a) {
                ck.error(pos, e.to_string());
            }
        }
        _ => {}
    });
    ck.diags
}
