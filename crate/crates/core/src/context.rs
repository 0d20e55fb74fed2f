//! Context dimensions with tree-shaped value domains, the context expression
//! language, the generality/disjointness theory, and entailment.
//!
//! A context assigns exactly one value to each dimension. Because the theory
//! only relates values of the same dimension, and within a dimension it says
//! "a value implies its parent" and "siblings exclude each other", every model
//! of `ctx ∪ theory` picks, per dimension, one node `w` in the subtree of the
//! assigned value and makes exactly the ancestors-or-self of `w` true. The
//! entailment check enumerates those chain models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("dimension `{0}` is declared twice")]
    DuplicateDimension(String),
    #[error("value `{value}` appears twice in dimension `{dim}`")]
    DuplicateValue { dim: String, value: String },
    #[error("value `{value}` of dimension `{dim}` is not reachable from the root `{root}`")]
    Unreachable {
        dim: String,
        value: String,
        root: String,
    },
    #[error("unknown context dimension `{0}`")]
    UnknownDimension(String),
    #[error("`{value}` is not a value of dimension `{dim}`")]
    UnknownValue { dim: String, value: String },
    #[error("dimension `{0}` is assigned more than once")]
    DuplicateAssignment(String),
    #[error("dimension `{0}` has no assignment")]
    MissingAssignment(String),
}

/// A context dimension with a finite tree-shaped value domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionDomain {
    name: String,
    root: String,
    /// Values in declaration order; the root comes first.
    values: Vec<String>,
    parent: BTreeMap<String, String>,
}

impl DimensionDomain {
    /// Builds a domain from its root and a list of `(child, parent)` edges.
    pub fn new(
        name: impl Into<String>,
        root: impl Into<String>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ContextError> {
        let name = name.into();
        let root = root.into();
        let mut values = vec![root.clone()];
        let mut seen: BTreeSet<String> = BTreeSet::from([root.clone()]);
        let mut parent = BTreeMap::new();
        for (child, par) in edges {
            if !seen.insert(child.clone()) {
                return Err(ContextError::DuplicateValue {
                    dim: name,
                    value: child,
                });
            }
            values.push(child.clone());
            parent.insert(child, par);
        }
        let domain = DimensionDomain {
            name,
            root,
            values,
            parent,
        };
        // Every parent must itself be a value, and every value must reach the
        // root; together with one parent per value this rules out cycles.
        for value in &domain.values {
            let mut cur = value.as_str();
            let mut steps = 0;
            while cur != domain.root {
                match domain.parent.get(cur) {
                    Some(p) if seen.contains(p) && steps <= domain.values.len() => {
                        cur = p;
                        steps += 1;
                    }
                    _ => {
                        return Err(ContextError::Unreachable {
                            dim: domain.name.clone(),
                            value: value.clone(),
                            root: domain.root.clone(),
                        })
                    }
                }
            }
        }
        Ok(domain)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn contains(&self, value: &str) -> bool {
        value == self.root || self.parent.contains_key(value)
    }

    pub fn parent_of(&self, value: &str) -> Option<&str> {
        self.parent.get(value).map(String::as_str)
    }

    /// Children of `value`, in declaration order.
    pub fn children(&self, value: &str) -> Vec<&str> {
        self.values
            .iter()
            .filter(|v| self.parent.get(v.as_str()).map(String::as_str) == Some(value))
            .map(String::as_str)
            .collect()
    }

    pub fn is_leaf(&self, value: &str) -> bool {
        !self.parent.values().any(|p| p == value)
    }

    /// `value` followed by its ancestors up to the root.
    pub fn ancestors_or_self<'a>(&'a self, value: &'a str) -> Vec<&'a str> {
        let mut chain = vec![value];
        let mut cur = value;
        while let Some(p) = self.parent.get(cur) {
            chain.push(p);
            cur = p;
        }
        chain
    }

    pub fn is_ancestor_or_self(&self, ancestor: &str, value: &str) -> bool {
        self.ancestors_or_self(value).contains(&ancestor)
    }

    /// All nodes of the subtree rooted at `value` (including it).
    pub fn subtree<'a>(&'a self, value: &'a str) -> Vec<&'a str> {
        self.values
            .iter()
            .map(String::as_str)
            .filter(|v| self.is_ancestor_or_self(value, v))
            .collect()
    }

    /// The `(child, parent)` edges in declaration order.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        self.values
            .iter()
            .filter_map(|v| self.parent.get(v).map(|p| (v.as_str(), p.as_str())))
            .collect()
    }
}

/// The declared set of context dimensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSchema {
    dimensions: Vec<DimensionDomain>,
}

impl ContextSchema {
    pub fn new(dimensions: Vec<DimensionDomain>) -> Result<Self, ContextError> {
        let mut names = BTreeSet::new();
        for d in &dimensions {
            if !names.insert(d.name.clone()) {
                return Err(ContextError::DuplicateDimension(d.name.clone()));
            }
        }
        Ok(ContextSchema { dimensions })
    }

    pub fn dimensions(&self) -> &[DimensionDomain] {
        &self.dimensions
    }

    pub fn dimension(&self, name: &str) -> Option<&DimensionDomain> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    fn domain(&self, dim: &str) -> Result<&DimensionDomain, ContextError> {
        self.dimension(dim)
            .ok_or_else(|| ContextError::UnknownDimension(dim.to_string()))
    }

    pub fn check_atom(&self, atom: &ContextAtom) -> Result<(), ContextError> {
        let d = self.domain(&atom.dim)?;
        if d.contains(&atom.value) {
            Ok(())
        } else {
            Err(ContextError::UnknownValue {
                dim: atom.dim.clone(),
                value: atom.value.clone(),
            })
        }
    }

    pub fn check_expr(&self, expr: &ContextExpr) -> Result<(), ContextError> {
        expr.atoms()
            .into_iter()
            .try_for_each(|a| self.check_atom(a))
    }

    /// Builds a total context from `(dimension, value)` pairs.
    pub fn context<D, V>(
        &self,
        pairs: impl IntoIterator<Item = (D, V)>,
    ) -> Result<ContextState, ContextError>
    where
        D: Into<String>,
        V: Into<String>,
    {
        let partial = self.partial(pairs)?;
        for d in &self.dimensions {
            if !partial.0.contains_key(&d.name) {
                return Err(ContextError::MissingAssignment(d.name.clone()));
            }
        }
        Ok(ContextState(partial.0))
    }

    /// Builds a partial assignment, at most one value per dimension.
    pub fn partial<D, V>(
        &self,
        pairs: impl IntoIterator<Item = (D, V)>,
    ) -> Result<PartialAssignment, ContextError>
    where
        D: Into<String>,
        V: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (d, v) in pairs {
            let atom = ContextAtom::new(d, v);
            self.check_atom(&atom)?;
            if map.insert(atom.dim.clone(), atom.value).is_some() {
                return Err(ContextError::DuplicateAssignment(atom.dim));
            }
        }
        Ok(PartialAssignment(map))
    }

    /// The theory of generality implications and sibling disjointness.
    pub fn theory(&self) -> ContextTheory {
        let mut implications = Vec::new();
        let mut disjointness = Vec::new();
        for d in &self.dimensions {
            for (child, parent) in d.edges() {
                implications.push((
                    ContextAtom::new(&d.name, child),
                    ContextAtom::new(&d.name, parent),
                ));
            }
            for v in &d.values {
                let kids = d.children(v);
                for a in &kids {
                    for b in &kids {
                        if a != b {
                            disjointness.push((
                                ContextAtom::new(&d.name, *a),
                                ContextAtom::new(&d.name, *b),
                            ));
                        }
                    }
                }
            }
        }
        ContextTheory {
            implications,
            disjointness,
        }
    }

    /// All chain models of `ctx ∪ theory`, one node per dimension.
    pub fn models_of(&self, ctx: &ContextState) -> Vec<ChainModel> {
        let mut models = vec![ChainModel(BTreeMap::new())];
        for d in &self.dimensions {
            let Some(v) = ctx.get(&d.name) else { continue };
            let nodes = d.subtree(v);
            models = models
                .into_iter()
                .flat_map(|m| {
                    nodes.iter().map(move |w| {
                        let mut m = m.clone();
                        m.0.insert(d.name.clone(), w.to_string());
                        m
                    })
                })
                .collect();
        }
        models
    }

    fn atom_in_model(&self, model: &BTreeMap<&str, &str>, atom: &ContextAtom) -> bool {
        match (self.dimension(&atom.dim), model.get(atom.dim.as_str())) {
            (Some(d), Some(w)) => d.is_ancestor_or_self(&atom.value, w),
            _ => false,
        }
    }

    /// Whether `ctx ∪ theory ⊨ expr`.
    pub fn entails(&self, ctx: &ContextState, expr: &ContextExpr) -> Result<bool, ContextError> {
        self.check_expr(expr)?;
        // Dimensions the expression does not mention cannot change its value,
        // so only the mentioned ones are enumerated.
        let dims: BTreeSet<&str> = expr.atoms().into_iter().map(|a| a.dim.as_str()).collect();
        let mut choices: Vec<(&str, Vec<&str>)> = Vec::new();
        for dim in dims {
            let d = self.domain(dim)?;
            let v = ctx
                .get(dim)
                .ok_or_else(|| ContextError::MissingAssignment(dim.to_string()))?;
            choices.push((dim, d.subtree(v)));
        }
        let mut idx = vec![0usize; choices.len()];
        loop {
            let model: BTreeMap<&str, &str> = choices
                .iter()
                .zip(&idx)
                .map(|((dim, nodes), &i)| (*dim, nodes[i]))
                .collect();
            if !expr.eval(&|a| self.atom_in_model(&model, a)) {
                return Ok(false);
            }
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return Ok(true);
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].1.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Overrides `ctx` with every assignment in `new`; other dimensions keep
    /// their previous value.
    pub fn apply_evolution(&self, ctx: &ContextState, new: &PartialAssignment) -> ContextState {
        apply_evolution(ctx, new)
    }
}

pub fn apply_evolution(ctx: &ContextState, new: &PartialAssignment) -> ContextState {
    let mut out = ctx.0.clone();
    for (d, v) in &new.0 {
        out.insert(d.clone(), v.clone());
    }
    ContextState(out)
}

/// An atomic context assignment `d:v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContextAtom {
    pub dim: String,
    pub value: String,
}

impl ContextAtom {
    pub fn new(dim: impl Into<String>, value: impl Into<String>) -> Self {
        ContextAtom {
            dim: dim.into(),
            value: value.into(),
        }
    }
}

impl fmt::Display for ContextAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dim, self.value)
    }
}

/// Propositional formulas over context atoms. `Or` and `Implies` are kept
/// as written so that printing reproduces the source shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContextExpr {
    True,
    False,
    Atom(ContextAtom),
    Not(Box<ContextExpr>),
    And(Box<ContextExpr>, Box<ContextExpr>),
    Or(Box<ContextExpr>, Box<ContextExpr>),
    Implies(Box<ContextExpr>, Box<ContextExpr>),
}

impl ContextExpr {
    pub fn atom(dim: impl Into<String>, value: impl Into<String>) -> Self {
        ContextExpr::Atom(ContextAtom::new(dim, value))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: ContextExpr) -> Self {
        ContextExpr::Not(Box::new(e))
    }

    pub fn and(a: ContextExpr, b: ContextExpr) -> Self {
        ContextExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ContextExpr, b: ContextExpr) -> Self {
        ContextExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: ContextExpr, b: ContextExpr) -> Self {
        ContextExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn atoms(&self) -> Vec<&ContextAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a ContextAtom>) {
        match self {
            ContextExpr::True | ContextExpr::False => {}
            ContextExpr::Atom(a) => out.push(a),
            ContextExpr::Not(e) => e.collect_atoms(out),
            ContextExpr::And(a, b) | ContextExpr::Or(a, b) | ContextExpr::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Classical evaluation under a truth assignment for atoms.
    pub fn eval(&self, truth: &dyn Fn(&ContextAtom) -> bool) -> bool {
        match self {
            ContextExpr::True => true,
            ContextExpr::False => false,
            ContextExpr::Atom(a) => truth(a),
            ContextExpr::Not(e) => !e.eval(truth),
            ContextExpr::And(a, b) => a.eval(truth) && b.eval(truth),
            ContextExpr::Or(a, b) => a.eval(truth) || b.eval(truth),
            ContextExpr::Implies(a, b) => !a.eval(truth) || b.eval(truth),
        }
    }

    /// True when no atom occurs under a negation (implication antecedents
    /// count as negated).
    pub fn is_positive(&self) -> bool {
        fn go(e: &ContextExpr, neg: bool) -> bool {
            match e {
                ContextExpr::True | ContextExpr::False => true,
                ContextExpr::Atom(_) => !neg,
                ContextExpr::Not(e) => go(e, !neg),
                ContextExpr::And(a, b) | ContextExpr::Or(a, b) => go(a, neg) && go(b, neg),
                ContextExpr::Implies(a, b) => go(a, !neg) && go(b, neg),
            }
        }
        go(self, false)
    }
}

/// A total assignment of one value per dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextState(BTreeMap<String, String>);

impl ContextState {
    pub fn get(&self, dim: &str) -> Option<&str> {
        self.0.get(dim).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(d, v)| (d.as_str(), v.as_str()))
    }

    pub fn atoms(&self) -> Vec<ContextAtom> {
        self.iter().map(|(d, v)| ContextAtom::new(d, v)).collect()
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }
}

impl fmt::Display for ContextState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(d, v)| format!("{d}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// At most one value per dimension; absent dimensions are left unchanged by
/// [`apply_evolution`].
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialAssignment(BTreeMap<String, String>);

impl PartialAssignment {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(d, v)| (d.as_str(), v.as_str()))
    }

    pub fn get(&self, dim: &str) -> Option<&str> {
        self.0.get(dim).map(String::as_str)
    }
}

impl From<ContextState> for PartialAssignment {
    fn from(c: ContextState) -> Self {
        PartialAssignment(c.0)
    }
}

/// One model of `ctx ∪ theory`: for each dimension, the deepest true value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChainModel(pub BTreeMap<String, String>);

impl ChainModel {
    /// The atoms true in this model.
    pub fn true_atoms(&self, schema: &ContextSchema) -> BTreeSet<ContextAtom> {
        let mut out = BTreeSet::new();
        for (dim, w) in &self.0 {
            if let Some(d) = schema.dimension(dim) {
                for v in d.ancestors_or_self(w) {
                    out.insert(ContextAtom::new(dim, v));
                }
            }
        }
        out
    }
}

/// The propositional theory of the value trees: `v1 → v2` whenever `v2` is the
/// parent of `v1`, and `v1 → ¬v2` for every ordered pair of distinct siblings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextTheory {
    pub implications: Vec<(ContextAtom, ContextAtom)>,
    pub disjointness: Vec<(ContextAtom, ContextAtom)>,
}

impl ContextTheory {
    pub fn is_empty(&self) -> bool {
        self.implications.is_empty() && self.disjointness.is_empty()
    }

    /// Whether a truth assignment satisfies every expression of the theory.
    pub fn satisfied_by(&self, truth: &dyn Fn(&ContextAtom) -> bool) -> bool {
        self.implications.iter().all(|(a, b)| !truth(a) || truth(b))
            && self
                .disjointness
                .iter()
                .all(|(a, b)| !truth(a) || !truth(b))
    }

    pub fn as_exprs(&self) -> Vec<ContextExpr> {
        let imp = self.implications.iter().map(|(a, b)| {
            ContextExpr::implies(ContextExpr::Atom(a.clone()), ContextExpr::Atom(b.clone()))
        });
        let dis = self.disjointness.iter().map(|(a, b)| {
            ContextExpr::implies(
                ContextExpr::Atom(a.clone()),
                ContextExpr::not(ContextExpr::Atom(b.clone())),
            )
        });
        imp.chain(dis).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> String {
        x.to_string()
    }

    pub(crate) fn retail_schema() -> ContextSchema {
        let pp = DimensionDomain::new(
            "PP",
            "AP",
            vec![
                (s("RE"), s("AP")),
                (s("WE"), s("RE")),
                (s("ME"), s("RE")),
                (s("N"), s("AP")),
            ],
        )
        .unwrap();
        let season = DimensionDomain::new(
            "S",
            "AS",
            vec![
                (s("PS"), s("AS")),
                (s("WH"), s("PS")),
                (s("NS"), s("AS")),
                (s("LS"), s("AS")),
            ],
        )
        .unwrap();
        ContextSchema::new(vec![pp, season]).unwrap()
    }

    fn only(schema: &ContextSchema, dim: &str) -> ContextSchema {
        ContextSchema::new(vec![schema.dimension(dim).unwrap().clone()]).unwrap()
    }

    fn pairs(v: &[(ContextAtom, ContextAtom)]) -> BTreeSet<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.value.clone(), b.value.clone()))
            .collect()
    }

    #[test]
    fn processing_plan_theory() {
        let th = only(&retail_schema(), "PP").theory();
        let imp: BTreeSet<_> = [("WE", "RE"), ("ME", "RE"), ("RE", "AP"), ("N", "AP")]
            .iter()
            .map(|(a, b)| (s(a), s(b)))
            .collect();
        assert_eq!(pairs(&th.implications), imp);
        let dis: BTreeSet<_> = [("WE", "ME"), ("ME", "WE"), ("RE", "N"), ("N", "RE")]
            .iter()
            .map(|(a, b)| (s(a), s(b)))
            .collect();
        assert_eq!(pairs(&th.disjointness), dis);
    }

    #[test]
    fn season_theory() {
        let th = only(&retail_schema(), "S").theory();
        assert_eq!(th.implications.len(), 4);
        let dis: BTreeSet<_> = [
            ("PS", "NS"),
            ("NS", "PS"),
            ("PS", "LS"),
            ("LS", "PS"),
            ("NS", "LS"),
            ("LS", "NS"),
        ]
        .iter()
        .map(|(a, b)| (s(a), s(b)))
        .collect();
        assert_eq!(pairs(&th.disjointness), dis);
    }

    #[test]
    fn single_node_domain() {
        let d = DimensionDomain::new("D", "top", vec![]).unwrap();
        let schema = ContextSchema::new(vec![d]).unwrap();
        assert!(schema.theory().is_empty());
        let ctx = schema.context([("D", "top")]).unwrap();
        let models = schema.models_of(&ctx);
        assert_eq!(models.len(), 1);
        assert_eq!(
            models[0].true_atoms(&schema),
            BTreeSet::from([ContextAtom::new("D", "top")])
        );
    }

    #[test]
    fn model_counts() {
        let schema = retail_schema();
        let ctx = schema.context([("PP", "WE"), ("S", "NS")]).unwrap();
        assert_eq!(schema.models_of(&ctx).len(), 1);
        let ctx = schema.context([("PP", "AP"), ("S", "AS")]).unwrap();
        assert_eq!(schema.models_of(&ctx).len(), 25);
    }

    #[test]
    fn entailment_examples() {
        let schema = retail_schema();
        let we_ns = schema.context([("PP", "WE"), ("S", "NS")]).unwrap();
        assert!(schema
            .entails(&we_ns, &ContextExpr::atom("PP", "RE"))
            .unwrap());
        assert!(schema
            .entails(&we_ns, &ContextExpr::not(ContextExpr::atom("PP", "N")))
            .unwrap());
        let top = schema.context([("PP", "AP"), ("S", "AS")]).unwrap();
        assert!(!schema
            .entails(&top, &ContextExpr::atom("PP", "WE"))
            .unwrap());
        let n_ns = schema.context([("PP", "N"), ("S", "NS")]).unwrap();
        let e = ContextExpr::and(ContextExpr::atom("PP", "N"), ContextExpr::atom("S", "NS"));
        assert!(schema.entails(&n_ns, &e).unwrap());
    }

    #[test]
    fn undeclared_references_are_errors() {
        let schema = retail_schema();
        let ctx = schema.context([("PP", "N"), ("S", "NS")]).unwrap();
        assert_eq!(
            schema.entails(&ctx, &ContextExpr::atom("X", "N")),
            Err(ContextError::UnknownDimension(s("X")))
        );
        assert!(matches!(
            schema.entails(&ctx, &ContextExpr::atom("PP", "PS")),
            Err(ContextError::UnknownValue { .. })
        ));
        // case-sensitive
        assert!(schema.entails(&ctx, &ContextExpr::atom("pp", "N")).is_err());
    }

    #[test]
    fn evolution() {
        let schema = retail_schema();
        let ctx = schema.context([("S", "PS"), ("PP", "N")]).unwrap();
        let new = schema.partial([("S", "NS")]).unwrap();
        assert_eq!(
            apply_evolution(&ctx, &new),
            schema.context([("S", "NS"), ("PP", "N")]).unwrap()
        );
        assert_eq!(apply_evolution(&ctx, &PartialAssignment::empty()), ctx);
        let ctx = schema.context([("S", "LS"), ("PP", "WE")]).unwrap();
        let new = schema.partial([("S", "PS"), ("PP", "N")]).unwrap();
        assert_eq!(
            apply_evolution(&ctx, &new),
            schema.context([("S", "PS"), ("PP", "N")]).unwrap()
        );
    }

    #[test]
    fn malformed_domains() {
        assert!(matches!(
            DimensionDomain::new("D", "r", vec![(s("a"), s("r")), (s("a"), s("r"))]),
            Err(ContextError::DuplicateValue { .. })
        ));
        assert!(matches!(
            DimensionDomain::new("D", "r", vec![(s("a"), s("b")), (s("b"), s("a"))]),
            Err(ContextError::Unreachable { .. })
        ));
        assert!(matches!(
            DimensionDomain::new("D", "r", vec![(s("a"), s("zzz"))]),
            Err(ContextError::Unreachable { .. })
        ));
        let schema = retail_schema();
        assert!(matches!(
            schema.partial([("S", "PS"), ("S", "NS")]),
            Err(ContextError::DuplicateAssignment(_))
        ));
        assert!(matches!(
            schema.context([("S", "PS")]),
            Err(ContextError::MissingAssignment(_))
        ));
    }
}
