mod support;

use ckab::dsl::{
    parse_properties, parse_property, parse_spec, print_formula, print_spec, Diagnostics,
};
use proptest::prelude::*;

fn positioned(d: &Diagnostics) -> bool {
    !d.0.is_empty() && d.0.iter().all(|x| x.pos.line >= 1 && x.pos.col >= 1)
}

#[test]
fn corpus_round_trips() {
    for (name, text) in support::corpus() {
        if name.ends_with(".ckab") {
            let spec = parse_spec(&text).unwrap().value;
            let printed = print_spec(&spec);
            let again = parse_spec(&printed)
                .unwrap_or_else(|e| panic!("{}", e.render(&name)))
                .value;
            assert_eq!(again, spec, "{name}");
        } else {
            let fs = parse_properties(&text).unwrap().value;
            for f in fs {
                let again = parse_property(&print_formula(&f)).unwrap().value;
                assert_eq!(again, f, "{name}");
            }
        }
    }
}

proptest! {
    #![proptest_config(support::proptest_config(300))]

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let f = support::random_ts::random_formula(&mut rng, 6);
        let text = print_formula(&f);
        let parsed = parse_property(&text);
        prop_assert!(parsed.is_ok(), "{}: {:?}", text, parsed.err());
        prop_assert_eq!(parsed.unwrap().value, f);
    }

    #[test]
    fn mutated_inputs_give_positioned_diagnostics(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let corpus = support::corpus();
        let (name, text) = &corpus[rand::Rng::random_range(&mut rng, 0..corpus.len())];
        let input = support::mutate(&mut rng, text);
        let result = if name.ends_with(".ckab") {
            parse_spec(&input).map(|p| p.warnings)
        } else {
            parse_properties(&input).map(|p| p.warnings)
        };
        match result {
            Ok(warnings) => prop_assert!(warnings.iter().all(|w| w.pos.line >= 1)),
            Err(d) => prop_assert!(positioned(&d), "{}", d.render(name)),
        }
    }
}
