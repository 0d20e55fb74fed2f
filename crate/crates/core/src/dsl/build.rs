//! Syntax tree to validated specification.

use std::collections::{BTreeMap, BTreeSet};

use super::diag::{Diagnostic, Diagnostics, Located, Parsed, Pos};
use super::lexer::lex;
use super::parser::{
    LAtom, LCq, LExpr, LKind, LTerm, Parser, RawAxiom, RawBasic, RawHeadTerm, RawSpec, RawTree,
};
use super::validate::{check_formula, validate_with_spans, SpecSpans};
use super::CkabSpec;
use crate::checker::MuFormula;
use crate::context::{
    ContextAtom, ContextError, ContextExpr, ContextSchema, ContextState, DimensionDomain,
};
use crate::engine::{
    ActionSpec, CondActionRule, ContextEvolutionRule, EffectSpec, HeadAtom, HeadTerm,
};
use crate::kb::{
    ABox, Atom, BasicConcept, BasicRole, ContextualizedTBox, Cq, Ecq, Fact, GuardedAssertion,
    TBoxAssertion, Term, Ucq,
};

fn has_errors(ds: &[Diagnostic]) -> bool {
    ds.iter().any(Diagnostic::is_error)
}

pub(crate) fn spec_from_text(text: &str) -> Result<Parsed<CkabSpec>, Diagnostics> {
    let toks = lex(text).map_err(|d| Diagnostics(vec![d]))?;
    let mut parser = Parser::new(toks);
    let raw = parser.spec();
    let mut diags = parser.diags;
    if has_errors(&diags) {
        return Err(Diagnostics(diags));
    }
    let built = build_spec(raw, &mut diags);
    let (spec, spans) = match built {
        Some(b) if !has_errors(&diags) => b,
        _ => return Err(Diagnostics(diags)),
    };
    diags.extend(validate_with_spans(&spec, &spans));
    if has_errors(&diags) {
        diags.sort_by_key(|d| d.pos);
        return Err(Diagnostics(diags));
    }
    Ok(Parsed {
        value: spec,
        warnings: diags,
    })
}

pub(crate) fn properties_from_text(
    text: &str,
) -> Result<Parsed<Vec<Located<MuFormula>>>, Diagnostics> {
    let toks = lex(text).map_err(|d| Diagnostics(vec![d]))?;
    let mut parser = Parser::without_newlines(toks);
    let exprs = parser.properties();
    let mut diags = parser.diags;
    let mut out = Vec::new();
    for e in &exprs {
        match to_mu(e) {
            Ok(f) => {
                diags.extend(check_formula(&f, e.pos));
                out.push(Located {
                    pos: e.pos,
                    value: f,
                });
            }
            Err(d) => diags.push(d),
        }
    }
    if out.is_empty() && diags.is_empty() {
        diags.push(Diagnostic::error(Pos::start(), "no property found"));
    }
    if has_errors(&diags) {
        return Err(Diagnostics(diags));
    }
    Ok(Parsed {
        value: out,
        warnings: diags,
    })
}

fn context_error(pos: Pos, e: ContextError) -> Diagnostic {
    let msg = match e {
        ContextError::DuplicateAssignment(d) => format!("duplicate dimension {d} in C_new"),
        ContextError::MissingAssignment(d) => {
            format!("init-context does not assign dimension {d}")
        }
        other => other.to_string(),
    };
    Diagnostic::error(pos, msg)
}

fn tree_edges(t: &RawTree, out: &mut Vec<(String, String)>) {
    for c in &t.children {
        out.push((c.value.clone(), t.value.clone()));
        tree_edges(c, out);
    }
}

/// Names used as unary and binary predicates outside the TBox.
#[derive(Default)]
struct Usage {
    unary: BTreeSet<String>,
    binary: BTreeSet<String>,
}

impl Usage {
    fn note(&mut self, pred: &str, arity: usize) {
        match arity {
            1 => self.unary.insert(pred.to_string()),
            2 => self.binary.insert(pred.to_string()),
            _ => false,
        };
    }

    fn expr(&mut self, e: &LExpr) {
        match &e.kind {
            LKind::Atom(a) => self.note(&a.pred, a.args.len()),
            LKind::Ucq(cqs) => {
                for cq in cqs {
                    for a in &cq.atoms {
                        self.note(&a.pred, a.args.len());
                    }
                }
            }
            LKind::Not(a)
            | LKind::Exists(_, a)
            | LKind::Forall(_, a)
            | LKind::Mu(_, a)
            | LKind::Nu(_, a)
            | LKind::Step(_, a)
            | LKind::Group(a) => self.expr(a),
            LKind::And(a, b) | LKind::Or(a, b) | LKind::Implies(a, b) => {
                self.expr(a);
                self.expr(b);
            }
            LKind::True | LKind::False | LKind::Ctx(..) | LKind::FixVar(_) => {}
        }
    }
}

fn build_spec(raw: RawSpec, diags: &mut Vec<Diagnostic>) -> Option<(CkabSpec, SpecSpans)> {
    let mut spans = SpecSpans::default();

    // dimensions
    let Some((dpos, dims)) = raw.dimensions else {
        diags.push(Diagnostic::error(
            Pos::start(),
            "missing dimensions section",
        ));
        return None;
    };
    spans.dimensions = dpos;
    let mut domains = Vec::new();
    for (pos, name, tree) in &dims {
        let mut edges = Vec::new();
        tree_edges(tree, &mut edges);
        match DimensionDomain::new(name.clone(), tree.value.clone(), edges) {
            Ok(d) => domains.push(d),
            Err(e) => diags.push(context_error(*pos, e)),
        }
    }
    let schema = match ContextSchema::new(domains) {
        Ok(s) => s,
        Err(e) => {
            diags.push(context_error(dpos, e));
            return None;
        }
    };
    if has_errors(diags) {
        return None;
    }

    // declarations
    let mut decl = |items: &[(Pos, String)], what: &str, spans: &mut BTreeMap<String, Pos>| {
        let mut set = BTreeSet::new();
        for (pos, name) in items {
            if !set.insert(name.clone()) {
                diags.push(Diagnostic::error(
                    *pos,
                    format!("duplicate {what} `{name}`"),
                ));
            }
            spans.entry(name.clone()).or_insert(*pos);
        }
        set
    };
    let concepts = decl(
        &raw.concepts,
        "concept declaration",
        &mut spans.declarations,
    );
    let roles = decl(&raw.roles, "role declaration", &mut spans.declarations);
    let constants = decl(
        &raw.constants,
        "constant declaration",
        &mut spans.declarations,
    );
    let mut services = BTreeMap::new();
    for (pos, name, arity) in &raw.services {
        if *arity == 0 {
            diags.push(Diagnostic::error(
                *pos,
                format!("service `{name}` needs at least one argument"),
            ));
        }
        if services.insert(name.clone(), *arity).is_some() {
            diags.push(Diagnostic::error(
                *pos,
                format!("duplicate service `{name}`"),
            ));
        }
        spans.declarations.entry(name.clone()).or_insert(*pos);
    }

    // which plain TBox names are roles
    let mut usage = Usage::default();
    for (_, pred, args) in &raw.abox {
        usage.note(pred, args.len());
    }
    for a in &raw.actions {
        for e in &a.effects {
            usage.expr(&e.body);
            for h in &e.head {
                usage.note(&h.pred, h.args.len());
            }
        }
    }
    for r in &raw.process {
        usage.expr(&r.query);
    }
    for r in &raw.context_rules {
        usage.expr(&r.query);
    }
    let mut role_names: BTreeSet<String> = roles.clone();
    role_names.extend(usage.binary.iter().cloned());
    for a in &raw.tbox {
        let mut mark = |b: &RawBasic| {
            if b.exists || b.inverse {
                role_names.insert(b.name.clone());
            }
        };
        match &a.axiom {
            RawAxiom::Funct(b) => {
                role_names.insert(b.name.clone());
            }
            RawAxiom::Incl { lhs, rhs, .. } => {
                mark(lhs);
                mark(rhs);
            }
        }
    }
    // role inclusions between plain names propagate roleness
    loop {
        let before = role_names.len();
        for a in &raw.tbox {
            if let RawAxiom::Incl { lhs, rhs, .. } = &a.axiom {
                if !lhs.exists
                    && !rhs.exists
                    && (role_names.contains(&lhs.name) || role_names.contains(&rhs.name))
                {
                    role_names.insert(lhs.name.clone());
                    role_names.insert(rhs.name.clone());
                }
            }
        }
        if role_names.len() == before {
            break;
        }
    }

    // tbox
    let mut entries = Vec::new();
    for a in &raw.tbox {
        let assertion = match &a.axiom {
            RawAxiom::Funct(b) => {
                if b.exists {
                    diags.push(Diagnostic::error(
                        b.pos,
                        "`funct` applies to a role, not `exists`",
                    ));
                    continue;
                }
                TBoxAssertion::Funct(role_of(b))
            }
            RawAxiom::Incl { lhs, negated, rhs } => {
                let is_role = !lhs.exists
                    && !rhs.exists
                    && (role_names.contains(&lhs.name) || role_names.contains(&rhs.name));
                if is_role {
                    let (r1, r2) = (role_of(lhs), role_of(rhs));
                    if *negated {
                        TBoxAssertion::RoleDisj(r1, r2)
                    } else {
                        TBoxAssertion::RoleIncl(r1, r2)
                    }
                } else {
                    let (Some(b1), Some(b2)) = (concept_of(lhs, diags), concept_of(rhs, diags))
                    else {
                        continue;
                    };
                    if *negated {
                        TBoxAssertion::ConceptDisj(b1, b2)
                    } else {
                        TBoxAssertion::ConceptIncl(b1, b2)
                    }
                }
            }
        };
        let guard = match guard_of(&a.guard, &schema) {
            Ok(g) => g,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        spans.tbox.push(a.pos);
        entries.push(GuardedAssertion { assertion, guard });
    }

    // abox
    let mut abox = ABox::new();
    for (pos, pred, args) in &raw.abox {
        if args.len() > 2 {
            diags.push(Diagnostic::error(
                *pos,
                format!(
                    "fact `{pred}` has {} arguments; facts are unary or binary",
                    args.len()
                ),
            ));
            continue;
        }
        let fact = Fact::new(pred.clone(), args.clone());
        spans.abox.entry(fact.clone()).or_insert(*pos);
        abox.insert(fact);
    }

    // initial context
    let initial_context = match &raw.init_context {
        Some((pos, pairs)) => {
            spans.init_context = *pos;
            let mut seen = BTreeSet::new();
            let mut ok = true;
            for (p, d, v) in pairs {
                if !seen.insert(d.clone()) {
                    diags.push(Diagnostic::error(
                        *p,
                        format!("dimension {d} assigned twice"),
                    ));
                    ok = false;
                } else if let Err(e) = schema.check_atom(&ContextAtom::new(d, v)) {
                    diags.push(context_error(*p, e));
                    ok = false;
                }
            }
            if !ok {
                return None;
            }
            match schema.context(pairs.iter().map(|(_, d, v)| (d.clone(), v.clone()))) {
                Ok(c) => c,
                Err(e) => {
                    diags.push(context_error(*pos, e));
                    return None;
                }
            }
        }
        None if schema.dimensions().is_empty() => ContextState::default(),
        None => {
            diags.push(Diagnostic::error(
                Pos::start(),
                "missing init-context section",
            ));
            return None;
        }
    };

    // actions
    let mut actions = Vec::new();
    for a in &raw.actions {
        let mut effects = Vec::new();
        let mut effect_pos = Vec::new();
        for e in &a.effects {
            match split_effect(&e.body) {
                Ok((qplus, qminus)) => {
                    let head = e
                        .head
                        .iter()
                        .map(|h| {
                            HeadAtom::new(h.pred.clone(), h.args.iter().map(head_term).collect())
                        })
                        .collect();
                    effects.push(EffectSpec {
                        qplus,
                        qminus,
                        head,
                    });
                    effect_pos.push(e.pos);
                }
                Err(d) => diags.push(d),
            }
        }
        spans.actions.push(a.pos);
        spans.effects.push(effect_pos);
        actions.push(ActionSpec {
            name: a.name.clone(),
            params: a.params.clone(),
            effects,
        });
    }

    // condition-action rules
    let mut process = Vec::new();
    for r in &raw.process {
        let query = match to_ecq(&r.query) {
            Ok(q) => q,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        let guard = match guard_of(&r.guard, &schema) {
            Ok(g) => g,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        let mut args = Vec::new();
        for (p, t) in &r.args {
            match t {
                LTerm::Var(v) => args.push(v.clone()),
                LTerm::Const(c) => diags.push(Diagnostic::error(
                    *p,
                    format!("action arguments must be variables, found `{c}`"),
                )),
            }
        }
        spans.process.push(r.pos);
        process.push(CondActionRule {
            query,
            guard,
            action: r.action.clone(),
            args,
        });
    }

    // context-evolution rules
    let mut context_rules = Vec::new();
    for r in &raw.context_rules {
        let query = match to_ecq(&r.query) {
            Ok(q) => q,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        let guard = match guard_of(&r.guard, &schema) {
            Ok(g) => g,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        let mut seen = BTreeSet::new();
        let mut bad = false;
        for (p, d, v) in &r.head {
            if !seen.insert(d.clone()) {
                diags.push(Diagnostic::error(
                    *p,
                    format!("duplicate dimension {d} in C_new"),
                ));
                bad = true;
            } else if let Err(e) = schema.check_atom(&ContextAtom::new(d, v)) {
                diags.push(context_error(*p, e));
                bad = true;
            }
        }
        if bad {
            continue;
        }
        let head = match schema.partial(r.head.iter().map(|(_, d, v)| (d.clone(), v.clone()))) {
            Ok(h) => h,
            Err(e) => {
                diags.push(context_error(r.pos, e));
                continue;
            }
        };
        spans.context_rules.push(r.pos);
        context_rules.push(ContextEvolutionRule { query, guard, head });
    }

    let spec = CkabSpec {
        schema,
        concepts,
        roles,
        services,
        constants,
        ctbox: ContextualizedTBox::new(entries),
        initial_abox: abox,
        actions,
        process,
        initial_context,
        context_rules,
    };
    Some((spec, spans))
}

fn role_of(b: &RawBasic) -> BasicRole {
    if b.inverse {
        BasicRole::inverse(b.name.clone())
    } else {
        BasicRole::named(b.name.clone())
    }
}

fn concept_of(b: &RawBasic, diags: &mut Vec<Diagnostic>) -> Option<BasicConcept> {
    if b.exists {
        Some(BasicConcept::exists(role_of(b)))
    } else if b.inverse {
        diags.push(Diagnostic::error(
            b.pos,
            format!("`^-` applies to roles; `{}` is used as a concept", b.name),
        ));
        None
    } else {
        Some(BasicConcept::atomic(b.name.clone()))
    }
}

fn guard_of(g: &Option<LExpr>, schema: &ContextSchema) -> Result<ContextExpr, Diagnostic> {
    match g {
        None => Ok(ContextExpr::True),
        Some(e) => {
            let c = to_context(e)?;
            schema
                .check_expr(&c)
                .map_err(|err| context_error(e.pos, err))?;
            Ok(c)
        }
    }
}

fn head_term(t: &RawHeadTerm) -> HeadTerm {
    match t {
        RawHeadTerm::Var(v) => HeadTerm::Var(v.clone()),
        RawHeadTerm::Const(c) => HeadTerm::Const(c.clone()),
        RawHeadTerm::Call(f, args) => {
            HeadTerm::Call(f.clone(), args.iter().map(head_term).collect())
        }
    }
}

fn flatten_and<'a>(e: &'a LExpr, out: &mut Vec<&'a LExpr>) {
    if let LKind::And(a, b) = &e.kind {
        flatten_and(a, out);
        out.push(b);
    } else {
        out.push(e);
    }
}

/// Splits `q+ & Q-`: `q+` is the leading run of plain atoms, or a leading
/// bracketed UCQ; the remaining conjuncts form the filter.
fn split_effect(body: &LExpr) -> Result<(Ucq, Option<Ecq>), Diagnostic> {
    let mut conj = Vec::new();
    flatten_and(body, &mut conj);
    let mut atoms = Vec::new();
    for c in &conj {
        match &c.kind {
            LKind::Atom(a) => atoms.push(atom_term(a)),
            _ => break,
        }
    }
    let (qplus, used) = if !atoms.is_empty() {
        let n = atoms.len();
        let q = Ucq::new(vec![Cq::new(vec![], atoms)])
            .map_err(|e| Diagnostic::error(body.pos, e.to_string()))?;
        (q, n)
    } else if let LKind::Ucq(cqs) = &conj[0].kind {
        (to_ucq(cqs, conj[0].pos)?, 1)
    } else {
        return Err(Diagnostic::error(
            body.pos,
            "an effect body must start with a positive query: atoms or a bracketed UCQ",
        ));
    };
    let mut qminus: Option<Ecq> = None;
    for c in &conj[used..] {
        let q = to_ecq(c)?;
        qminus = Some(match qminus {
            None => q,
            Some(prev) => Ecq::and(prev, q),
        });
    }
    Ok((qplus, qminus))
}

fn lterm(t: &LTerm) -> Term {
    match t {
        LTerm::Var(v) => Term::var(v.clone()),
        LTerm::Const(c) => Term::constant(c.clone()),
    }
}

fn atom_term(a: &LAtom) -> Atom<Term> {
    Atom::new(a.pred.clone(), a.args.iter().map(lterm).collect())
}

fn to_ucq(cqs: &[LCq], pos: Pos) -> Result<Ucq, Diagnostic> {
    let disjuncts = cqs
        .iter()
        .map(|cq| Cq::new(cq.exists.clone(), cq.atoms.iter().map(atom_term).collect()))
        .collect();
    Ucq::new(disjuncts).map_err(|e| Diagnostic::error(pos, e.to_string()))
}

pub(crate) fn to_context(e: &LExpr) -> Result<ContextExpr, Diagnostic> {
    Ok(match &e.kind {
        LKind::True => ContextExpr::True,
        LKind::False => ContextExpr::False,
        LKind::Ctx(d, v) => ContextExpr::atom(d.clone(), v.clone()),
        LKind::Group(a) => to_context(a)?,
        LKind::Not(a) => ContextExpr::not(to_context(a)?),
        LKind::And(a, b) => ContextExpr::and(to_context(a)?, to_context(b)?),
        LKind::Or(a, b) => ContextExpr::or(to_context(a)?, to_context(b)?),
        LKind::Implies(a, b) => ContextExpr::implies(to_context(a)?, to_context(b)?),
        _ => {
            return Err(Diagnostic::error(
                e.pos,
                "expected a context expression over `dimension:value` atoms",
            ))
        }
    })
}

pub(crate) fn to_ecq(e: &LExpr) -> Result<Ecq, Diagnostic> {
    Ok(match &e.kind {
        LKind::True => Ecq::True,
        LKind::False => Ecq::False,
        LKind::Atom(a) => Ecq::Ucq(Ucq::cq(vec![atom_term(a)])),
        LKind::Ucq(cqs) => Ecq::Ucq(to_ucq(cqs, e.pos)?),
        LKind::Group(a) => to_ecq(a)?,
        LKind::Not(a) => Ecq::not(to_ecq(a)?),
        LKind::And(a, b) => Ecq::and(to_ecq(a)?, to_ecq(b)?),
        LKind::Or(a, b) => Ecq::or(to_ecq(a)?, to_ecq(b)?),
        LKind::Implies(a, b) => Ecq::Implies(Box::new(to_ecq(a)?), Box::new(to_ecq(b)?)),
        LKind::Exists(x, a) => Ecq::exists(x.clone(), to_ecq(a)?),
        LKind::Forall(x, a) => Ecq::forall(x.clone(), to_ecq(a)?),
        LKind::Ctx(..) => {
            return Err(Diagnostic::error(
                e.pos,
                "context atoms cannot appear in a query; put them in the `@` guard",
            ))
        }
        LKind::FixVar(z) => {
            return Err(Diagnostic::error(
                e.pos,
                format!("unexpected name `{z}` in a query; atoms need arguments"),
            ))
        }
        LKind::Mu(..) | LKind::Nu(..) | LKind::Step(..) => {
            return Err(Diagnostic::error(
                e.pos,
                "fixpoints and modalities are not allowed in queries",
            ))
        }
    })
}

pub(crate) fn to_mu(e: &LExpr) -> Result<MuFormula, Diagnostic> {
    Ok(match &e.kind {
        LKind::True => MuFormula::True,
        LKind::False => MuFormula::False,
        LKind::Atom(a) => MuFormula::Query(Ucq::cq(vec![atom_term(a)])),
        LKind::Ucq(cqs) => MuFormula::Query(to_ucq(cqs, e.pos)?),
        LKind::Ctx(d, v) => MuFormula::Context(ContextAtom::new(d.clone(), v.clone())),
        LKind::FixVar(z) => MuFormula::var(z.clone()),
        LKind::Group(a) => to_mu(a)?,
        LKind::Not(a) => MuFormula::not(to_mu(a)?),
        LKind::And(a, b) => MuFormula::and(to_mu(a)?, to_mu(b)?),
        LKind::Or(a, b) => MuFormula::or(to_mu(a)?, to_mu(b)?),
        LKind::Implies(a, b) => MuFormula::implies(to_mu(a)?, to_mu(b)?),
        LKind::Exists(x, a) => MuFormula::exists(x.clone(), to_mu(a)?),
        LKind::Forall(x, a) => MuFormula::forall(x.clone(), to_mu(a)?),
        LKind::Step(p, a) => MuFormula::step(*p, to_mu(a)?),
        LKind::Mu(z, a) => MuFormula::mu(z.clone(), to_mu(a)?),
        LKind::Nu(z, a) => MuFormula::nu(z.clone(), to_mu(a)?),
    })
}
