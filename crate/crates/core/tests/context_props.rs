mod support;

use ckab::context::{ContextAtom, ContextExpr, PartialAssignment};
use proptest::prelude::*;
use support::context_oracle::{
    brute_force_entails, model_count, random_context, random_expr, random_schema,
};

proptest! {
    #![proptest_config(support::proptest_config(128))]

    #[test]
    fn entailment_matches_truth_tables(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let schema = random_schema(&mut rng, 3, 4);
        let ctx = random_context(&mut rng, &schema);
        let expr = random_expr(&mut rng, &schema, 5);
        prop_assert_eq!(schema.entails(&ctx, &expr).unwrap(), brute_force_entails(&schema, &ctx, &expr));
    }

    #[test]
    fn atoms_follow_the_tree(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let schema = random_schema(&mut rng, 3, 6);
        let ctx = random_context(&mut rng, &schema);
        for d in schema.dimensions() {
            let assigned = ctx.get(d.name()).unwrap();
            for v in d.values() {
                let atom = ContextExpr::Atom(ContextAtom::new(d.name(), v.clone()));
                let above = d.is_ancestor_or_self(v, assigned);
                let below = d.is_ancestor_or_self(assigned, v);
                prop_assert_eq!(schema.entails(&ctx, &atom).unwrap(), above);
                prop_assert_eq!(
                    schema.entails(&ctx, &ContextExpr::not(atom)).unwrap(),
                    !above && !below
                );
            }
        }
    }

    #[test]
    fn model_count_is_product_of_subtrees(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let schema = random_schema(&mut rng, 3, 5);
        let ctx = random_context(&mut rng, &schema);
        let expected: usize = schema
            .dimensions()
            .iter()
            .map(|d| d.subtree(ctx.get(d.name()).unwrap()).len())
            .product();
        prop_assert_eq!(schema.models_of(&ctx).len(), expected);
        prop_assert_eq!(model_count(&schema, &ctx), expected);
    }

    #[test]
    fn evolution_keeps_and_overrides(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let schema = random_schema(&mut rng, 3, 5);
        let ctx = random_context(&mut rng, &schema);
        prop_assert_eq!(&schema.apply_evolution(&ctx, &PartialAssignment::empty()), &ctx);
        let other = random_context(&mut rng, &schema);
        let chosen: Vec<(String, String)> = other
            .iter()
            .filter(|_| rand::Rng::random_bool(&mut rng, 0.5))
            .map(|(d, v)| (d.to_string(), v.to_string()))
            .collect();
        let new = schema.partial(chosen.clone()).unwrap();
        let next = schema.apply_evolution(&ctx, &new);
        for d in schema.dimensions() {
            let expected = new.get(d.name()).or(ctx.get(d.name())).unwrap();
            prop_assert_eq!(next.get(d.name()), Some(expected));
        }
        // idempotent once applied
        prop_assert_eq!(&schema.apply_evolution(&next, &new), &next);
    }
}
