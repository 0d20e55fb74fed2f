use ckab::checker::oracle::{brute_force_extension, OracleConfig};
use ckab::checker::{model_check, Valuation};
use ckab::dsl::{parse_properties, parse_spec, CkabSpec};
use ckab::statespace::{build, check_weak_acyclicity, BuildConfig};

fn load(name: &str) -> CkabSpec {
    let path = format!("{}/../../specs/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap();
    match parse_spec(&text) {
        Ok(p) => p.value,
        Err(e) => panic!("{}", e.render(&path)),
    }
}

fn order_property() -> ckab::checker::MuFormula {
    let path = format!("{}/../../specs/retail.mu", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    parse_properties(&text).unwrap().value.remove(0)
}

fn verdict(name: &str) -> (bool, Option<ckab::checker::Witness>, usize) {
    let ts = build(&load(name), &BuildConfig::default()).unwrap();
    assert!(ts.is_complete());
    let f = order_property();
    let r = model_check(&ts, &f).unwrap();
    let cfg = OracleConfig {
        max_states: 2000,
        ..OracleConfig::default()
    };
    let oracle = brute_force_extension(&ts, &f, &Valuation::new(), cfg).unwrap();
    assert_eq!(oracle, r.extent);
    (r.holds, r.witness, ts.len())
}

#[test]
fn every_order_is_delivered() {
    let (holds, _, n) = verdict("retail_delivered.ckab");
    assert!(holds);
    eprintln!("delivered variant: {n} states");
}

#[test]
fn blocked_order_is_never_delivered() {
    let (holds, witness, n) = verdict("retail_stuck.ckab");
    assert!(!holds);
    let w = witness.expect("failing liveness has a witness");
    assert!(w.loop_to.is_some(), "{w}");
    assert_eq!(w.bindings, vec![("x".to_string(), "o2".to_string())]);
    eprintln!("stuck variant: {n} states, witness {w}");
}

#[test]
fn call_free_variant_is_weakly_acyclic_and_bounded() {
    let sp = load("retail_nocalls.ckab");
    assert!(check_weak_acyclicity(&sp).weakly_acyclic);
    let k = ckab::statespace::auto_k(&sp);
    let cfg = BuildConfig {
        bound: Some(sp.initial_adom().len() + k + 1),
        ..BuildConfig::default()
    };
    let ts = build(&sp, &cfg).unwrap();
    assert!(ts.is_complete());
}
