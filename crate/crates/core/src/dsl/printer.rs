//! Canonical text for specifications and formulas. Output parses back to
//! a structurally equal value.

use std::fmt::Write;

use super::CkabSpec;
use crate::checker::MuFormula;
use crate::context::{ContextExpr, DimensionDomain};
use crate::engine::{ActionSpec, EffectSpec, HeadTerm};
use crate::kb::{Ecq, TBoxAssertion, Term, Ucq};

/// Printable expression: leaves, prefix operators, binders whose body
/// extends as far as possible, and binary connectives.
enum P {
    Leaf(String),
    Prefix(String, Box<P>),
    Binder(String, Box<P>),
    Bin(Op, Box<P>, Box<P>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Implies,
    Or,
    And,
}

impl Op {
    fn level(self) -> u8 {
        match self {
            Op::Implies => 1,
            Op::Or => 2,
            Op::And => 3,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::Implies => "->",
            Op::Or => "|",
            Op::And => "&",
        }
    }
}

const PREFIX_LEVEL: u8 = 4;
const LEAF_LEVEL: u8 = 5;

fn level(p: &P) -> u8 {
    match p {
        P::Leaf(_) => LEAF_LEVEL,
        P::Prefix(..) => PREFIX_LEVEL,
        P::Binder(..) => 0,
        P::Bin(op, ..) => op.level(),
    }
}

fn render(p: &P) -> String {
    match p {
        P::Leaf(s) => s.clone(),
        P::Prefix(op, a) => {
            let inner = render(a);
            if level(a) < PREFIX_LEVEL {
                format!("{op}({inner})")
            } else {
                format!("{op}{inner}")
            }
        }
        P::Binder(head, body) => format!("{head} {}", render(body)),
        P::Bin(op, a, b) => {
            let (la, lb) = (level(a), level(b));
            let wrap_a = la < op.level() || (la == op.level() && *op == Op::Implies);
            let wrap_b = lb < op.level() || (lb == op.level() && *op != Op::Implies);
            let sa = if wrap_a {
                format!("({})", render(a))
            } else {
                render(a)
            };
            let sb = if wrap_b {
                format!("({})", render(b))
            } else {
                render(b)
            };
            format!("{sa} {} {sb}", op.symbol())
        }
    }
}

fn bin(op: Op, a: P, b: P) -> P {
    P::Bin(op, Box::new(a), Box::new(b))
}

fn context_p(e: &ContextExpr) -> P {
    match e {
        ContextExpr::True => P::Leaf("true".into()),
        ContextExpr::False => P::Leaf("false".into()),
        ContextExpr::Atom(a) => P::Leaf(a.to_string()),
        ContextExpr::Not(a) => P::Prefix("!".into(), Box::new(context_p(a))),
        ContextExpr::And(a, b) => bin(Op::And, context_p(a), context_p(b)),
        ContextExpr::Or(a, b) => bin(Op::Or, context_p(a), context_p(b)),
        ContextExpr::Implies(a, b) => bin(Op::Implies, context_p(a), context_p(b)),
    }
}

fn term(t: &Term) -> String {
    t.to_string()
}

fn atoms_text<'a>(atoms: impl Iterator<Item = &'a crate::kb::Atom<Term>>) -> String {
    atoms
        .map(|a| {
            format!(
                "{}({})",
                a.pred,
                a.args.iter().map(term).collect::<Vec<_>>().join(", ")
            )
        })
        .collect::<Vec<_>>()
        .join(" & ")
}

/// `P(?x)` for a one-atom query without quantifiers, brackets otherwise.
pub fn print_ucq(q: &Ucq) -> String {
    if let [d] = q.disjuncts() {
        if d.exists.is_empty() && d.atoms.len() == 1 {
            return atoms_text(d.atoms.iter());
        }
    }
    bracketed_ucq(q)
}

fn bracketed_ucq(q: &Ucq) -> String {
    let parts: Vec<String> = q
        .disjuncts()
        .iter()
        .map(|d| {
            let body = atoms_text(d.atoms.iter());
            if d.exists.is_empty() {
                body
            } else {
                let vars: Vec<String> = d.exists.iter().map(|v| format!("?{v}")).collect();
                format!("exists {}. {body}", vars.join(" "))
            }
        })
        .collect();
    format!("[{}]", parts.join(" | "))
}

fn ecq_p(q: &Ecq) -> P {
    match q {
        Ecq::True => P::Leaf("true".into()),
        Ecq::False => P::Leaf("false".into()),
        Ecq::Ucq(u) => P::Leaf(print_ucq(u)),
        Ecq::Not(a) => P::Prefix("!".into(), Box::new(ecq_p(a))),
        Ecq::And(a, b) => bin(Op::And, ecq_p(a), ecq_p(b)),
        Ecq::Or(a, b) => bin(Op::Or, ecq_p(a), ecq_p(b)),
        Ecq::Implies(a, b) => bin(Op::Implies, ecq_p(a), ecq_p(b)),
        Ecq::Exists(x, a) => P::Binder(format!("exists ?{x}."), Box::new(ecq_p(a))),
        Ecq::Forall(x, a) => P::Binder(format!("forall ?{x}."), Box::new(ecq_p(a))),
    }
}

fn mu_p(f: &MuFormula) -> P {
    match f {
        MuFormula::True => P::Leaf("true".into()),
        MuFormula::False => P::Leaf("false".into()),
        MuFormula::Query(u) => P::Leaf(print_ucq(u)),
        MuFormula::Context(a) => P::Leaf(a.to_string()),
        MuFormula::Var(z) => P::Leaf(z.clone()),
        MuFormula::Not(a) => P::Prefix("!".into(), Box::new(mu_p(a))),
        MuFormula::And(a, b) => bin(Op::And, mu_p(a), mu_p(b)),
        MuFormula::Or(a, b) => bin(Op::Or, mu_p(a), mu_p(b)),
        MuFormula::Implies(a, b) => bin(Op::Implies, mu_p(a), mu_p(b)),
        MuFormula::Exists(x, a) => P::Binder(format!("exists ?{x}."), Box::new(mu_p(a))),
        MuFormula::Forall(x, a) => P::Binder(format!("forall ?{x}."), Box::new(mu_p(a))),
        MuFormula::Step(pair, a) => P::Prefix(format!("{} ", pair.token()), Box::new(mu_p(a))),
        MuFormula::Mu(z, a) => P::Binder(format!("mu {z}."), Box::new(mu_p(a))),
        MuFormula::Nu(z, a) => P::Binder(format!("nu {z}."), Box::new(mu_p(a))),
    }
}

pub fn print_context_expr(e: &ContextExpr) -> String {
    render(&context_p(e))
}

pub fn print_ecq(q: &Ecq) -> String {
    render(&ecq_p(q))
}

pub fn print_formula(f: &MuFormula) -> String {
    render(&mu_p(f))
}

pub fn print_tbox_assertion(a: &TBoxAssertion) -> String {
    a.to_string()
}

fn tree(d: &DimensionDomain, v: &str) -> String {
    let children = d.children(v);
    if children.is_empty() {
        v.to_string()
    } else {
        let parts: Vec<String> = children.into_iter().map(|c| tree(d, c)).collect();
        format!("{v}({})", parts.join(", "))
    }
}

fn head_term(t: &HeadTerm) -> String {
    t.to_string()
}

fn effect_text(e: &EffectSpec) -> String {
    let plus = match e.qplus.disjuncts() {
        [d] if d.exists.is_empty() => atoms_text(d.atoms.iter()),
        _ => bracketed_ucq(&e.qplus),
    };
    let body = match &e.qminus {
        None => plus,
        Some(m) => format!("{plus} & ({})", print_ecq(m)),
    };
    let head: Vec<String> = e
        .head
        .iter()
        .map(|a| {
            format!(
                "{}({})",
                a.pred,
                a.args.iter().map(head_term).collect::<Vec<_>>().join(", ")
            )
        })
        .collect();
    if head.is_empty() {
        format!("{body} ~> {{}}")
    } else {
        format!("{body} ~> {{ {} }}", head.join(", "))
    }
}

fn action_text(a: &ActionSpec, out: &mut String) {
    let params: Vec<String> = a.params.iter().map(|p| format!("?{p}")).collect();
    let _ = writeln!(out, "  {}({}) {{", a.name, params.join(", "));
    for e in &a.effects {
        let _ = writeln!(out, "    {}", effect_text(e));
    }
    out.push_str("  }\n");
}

fn guard_text(g: &ContextExpr) -> String {
    match g {
        ContextExpr::True => String::new(),
        other => format!(" @ {}", print_context_expr(other)),
    }
}

fn list_section<'a>(out: &mut String, name: &str, items: impl Iterator<Item = &'a String>) {
    let items: Vec<&str> = items.map(String::as_str).collect();
    if !items.is_empty() {
        let _ = writeln!(out, "{name} {{ {} }}", items.join(", "));
    }
}

pub fn print_spec(spec: &CkabSpec) -> String {
    let mut out = String::new();
    out.push_str("dimensions {\n");
    for d in spec.schema.dimensions() {
        let _ = writeln!(out, "  {}: {}", d.name(), tree(d, d.root()));
    }
    out.push_str("}\n");
    list_section(&mut out, "concepts", spec.concepts.iter());
    list_section(&mut out, "roles", spec.roles.iter());
    if !spec.services.is_empty() {
        let items: Vec<String> = spec
            .services
            .iter()
            .map(|(f, n)| format!("{f}/{n}"))
            .collect();
        let _ = writeln!(out, "services {{ {} }}", items.join(", "));
    }
    list_section(&mut out, "constants", spec.constants.iter());
    if !spec.ctbox.is_empty() {
        out.push_str("tbox {\n");
        for e in &spec.ctbox.entries {
            let _ = writeln!(out, "  {}{}", e.assertion, guard_text(&e.guard));
        }
        out.push_str("}\n");
    }
    if !spec.initial_abox.is_empty() {
        out.push_str("abox {\n");
        for f in spec.initial_abox.iter() {
            let _ = writeln!(out, "  {f}");
        }
        out.push_str("}\n");
    }
    if !spec.schema.dimensions().is_empty() {
        let items: Vec<String> = spec
            .initial_context
            .iter()
            .map(|(d, v)| format!("{d}:{v}"))
            .collect();
        let _ = writeln!(out, "init-context {{ {} }}", items.join(", "));
    }
    if !spec.actions.is_empty() {
        out.push_str("actions {\n");
        for a in &spec.actions {
            action_text(a, &mut out);
        }
        out.push_str("}\n");
    }
    if !spec.process.is_empty() {
        out.push_str("process {\n");
        for r in &spec.process {
            let args: Vec<String> = r.args.iter().map(|a| format!("?{a}")).collect();
            let _ = writeln!(
                out,
                "  {}{} |-> {}({})",
                print_ecq(&r.query),
                guard_text(&r.guard),
                r.action,
                args.join(", ")
            );
        }
        out.push_str("}\n");
    }
    if !spec.context_rules.is_empty() {
        out.push_str("context-rules {\n");
        for r in &spec.context_rules {
            let head: Vec<String> = r.head.iter().map(|(d, v)| format!("{d}:{v}")).collect();
            let head = if head.is_empty() {
                "{}".to_string()
            } else {
                format!("{{ {} }}", head.join(", "))
            };
            let _ = writeln!(
                out,
                "  {}{} |-> {head}",
                print_ecq(&r.query),
                guard_text(&r.guard)
            );
        }
        out.push_str("}\n");
    }
    out
}
