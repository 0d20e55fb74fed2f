//! Truth-table entailment over context atoms, and random dimension trees.

use std::collections::BTreeSet;

use ckab::context::{ContextAtom, ContextExpr, ContextSchema, ContextState, DimensionDomain};
use rand::Rng;

pub fn random_schema(rng: &mut impl Rng, max_dims: usize, max_values: usize) -> ContextSchema {
    let dims = rng.random_range(1..=max_dims);
    let domains = (0..dims)
        .map(|d| {
            let n = rng.random_range(1..=max_values);
            let name = |j: usize| format!("D{d}v{j}");
            let edges: Vec<(String, String)> = (1..n)
                .map(|j| (name(j), name(rng.random_range(0..j))))
                .collect();
            DimensionDomain::new(format!("D{d}"), name(0), edges).unwrap()
        })
        .collect();
    ContextSchema::new(domains).unwrap()
}

pub fn random_context(rng: &mut impl Rng, schema: &ContextSchema) -> ContextState {
    let pairs: Vec<(String, String)> = schema
        .dimensions()
        .iter()
        .map(|d| {
            let vs = d.values();
            (
                d.name().to_string(),
                vs[rng.random_range(0..vs.len())].clone(),
            )
        })
        .collect();
    schema.context(pairs).unwrap()
}

pub fn random_atom(rng: &mut impl Rng, schema: &ContextSchema) -> ContextAtom {
    let ds = schema.dimensions();
    let d = &ds[rng.random_range(0..ds.len())];
    let vs = d.values();
    ContextAtom::new(d.name(), vs[rng.random_range(0..vs.len())].clone())
}

pub fn random_expr(rng: &mut impl Rng, schema: &ContextSchema, depth: usize) -> ContextExpr {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..10) {
            0 => ContextExpr::True,
            1 => ContextExpr::False,
            _ => ContextExpr::Atom(random_atom(rng, schema)),
        };
    }
    let sub = |rng: &mut _| Box::new(random_expr(rng, schema, depth - 1));
    match rng.random_range(0..4) {
        0 => ContextExpr::Not(sub(rng)),
        1 => ContextExpr::And(sub(rng), sub(rng)),
        2 => ContextExpr::Or(sub(rng), sub(rng)),
        _ => ContextExpr::Implies(sub(rng), sub(rng)),
    }
}

/// Every assignment of truth values to the atoms of one dimension that
/// satisfies the theory and makes the context's atom for that dimension
/// true. Constraints never relate two dimensions, so the models of the whole
/// context are the product of these.
fn dimension_models(
    schema: &ContextSchema,
    ctx: &ContextState,
    d: &DimensionDomain,
) -> Vec<BTreeSet<ContextAtom>> {
    let theory = schema.theory();
    let atoms: Vec<ContextAtom> = d
        .values()
        .iter()
        .map(|v| ContextAtom::new(d.name(), v.clone()))
        .collect();
    let assigned = ContextAtom::new(d.name(), ctx.get(d.name()).unwrap());
    let mut out = Vec::new();
    for mask in 0u32..(1 << atoms.len()) {
        let truth: BTreeSet<ContextAtom> = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect();
        if !truth.contains(&assigned) {
            continue;
        }
        let t = |a: &ContextAtom| truth.contains(a);
        let ok = theory
            .implications
            .iter()
            .filter(|(a, _)| a.dim == d.name())
            .all(|(a, b)| !t(a) || t(b))
            && theory
                .disjointness
                .iter()
                .filter(|(a, _)| a.dim == d.name())
                .all(|(a, b)| !(t(a) && t(b)));
        if ok {
            out.push(truth);
        }
    }
    out
}

pub fn model_count(schema: &ContextSchema, ctx: &ContextState) -> usize {
    schema
        .dimensions()
        .iter()
        .map(|d| dimension_models(schema, ctx, d).len())
        .product()
}

pub fn brute_force_entails(schema: &ContextSchema, ctx: &ContextState, expr: &ContextExpr) -> bool {
    let per_dim: Vec<Vec<BTreeSet<ContextAtom>>> = schema
        .dimensions()
        .iter()
        .map(|d| dimension_models(schema, ctx, d))
        .collect();
    let mut idx = vec![0usize; per_dim.len()];
    loop {
        let holds = expr.eval(&|a: &ContextAtom| {
            let i = schema
                .dimensions()
                .iter()
                .position(|d| d.name() == a.dim)
                .unwrap();
            per_dim[i][idx[i]].contains(a)
        });
        if !holds {
            return false;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return true;
            }
            idx[k] += 1;
            if idx[k] < per_dim[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
