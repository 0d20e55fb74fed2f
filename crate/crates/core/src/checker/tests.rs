use super::oracle::{brute_force_extension, OracleConfig};
use super::*;
use crate::dsl::{parse_property, parse_spec, CkabSpec};
use crate::kb::Fact;
use crate::statespace::{build, BuildConfig, Phase, StateSpec, TransitionSystem};

const RETAIL: &str = include_str!("../../../../specs/retail.ckab");

const GOALS: &str = "
dimensions { M: Any(On, Off) }
concepts { Goal, P }
abox { P(a) }
init-context { M:On }
actions { }
context-rules { true |-> {} }
";

fn spec(text: &str) -> CkabSpec {
    match parse_spec(text) {
        Ok(p) => p.value,
        Err(e) => panic!("{}", e.render("test.ckab")),
    }
}

fn prop(text: &str) -> MuFormula {
    match parse_property(text) {
        Ok(p) => p.value,
        Err(e) => panic!("{}", e.render("test.mu")),
    }
}

fn ids(s: &StateSet) -> Vec<usize> {
    s.iter().collect()
}

/// Stable states are even, intermediate ones odd; `goal` marks stable
/// states with Goal(a).
fn hand_ts(n: usize, goal: &[usize], edges: &[(usize, usize)]) -> TransitionSystem {
    let sp = spec(GOALS);
    let states = (0..n)
        .map(|i| {
            let mut facts = vec![Fact::concept("P", "a")];
            if goal.contains(&i) {
                facts.push(Fact::concept("Goal", "a"));
            }
            // distinct filler keeps contents unique
            facts.push(Fact::concept("P", format!("c{i}")));
            let phase = if i % 2 == 0 {
                Phase::Stable
            } else {
                facts.push(Fact::marker());
                Phase::Intermediate
            };
            StateSpec {
                phase,
                ctx: sp.initial_context.clone(),
                abox: facts.into_iter().collect(),
                scmap: Default::default(),
            }
        })
        .collect();
    TransitionSystem::new(sp.schema, sp.ctbox, states, 0, edges.iter().copied()).unwrap()
}

fn six() -> TransitionSystem {
    // s0 -> s1 -> s2 (dead end), s0 -> s3 -> s4 (goal), s4 -> s5 -> s4
    hand_ts(6, &[4], &[(0, 1), (1, 2), (0, 3), (3, 4), (4, 5), (5, 4)])
}

fn agree(ts: &TransitionSystem, f: &MuFormula) -> StateSet {
    let fast = extension(ts, f, &Valuation::new(), &FixValuation::new()).unwrap();
    let slow = brute_force_extension(ts, f, &Valuation::new(), OracleConfig::default()).unwrap();
    assert_eq!(fast, slow, "{}", crate::dsl::print_formula(f));
    fast
}

#[test]
fn true_holds_everywhere() {
    let ts = six();
    assert_eq!(agree(&ts, &MuFormula::True).len(), 6);
}

#[test]
fn two_step_diamond() {
    let ts = hand_ts(3, &[], &[(0, 1), (1, 2)]);
    let f = prop("<-><-> true");
    assert_eq!(ids(&agree(&ts, &f)), vec![0]);
    assert!(model_check(&ts, &f).unwrap().holds);
}

#[test]
fn reachability_fixpoint() {
    let ts = six();
    let f = prop("mu Z. (exists ?x. Goal(?x)) | <-><-> Z");
    assert_eq!(ids(&agree(&ts, &f)), vec![0, 4]);
    let r = model_check(&ts, &f).unwrap();
    assert!(r.holds);
    let w = r.witness.unwrap();
    assert_eq!(w.path, vec![0, 3, 4]);
    assert_eq!(w.to_string(), "s0 -> s3 -> s4 with ?x=a");
}

#[test]
fn vacuous_box_at_dead_end() {
    let ts = hand_ts(1, &[], &[]);
    assert!(model_check(&ts, &prop("[-][-] false")).unwrap().holds);
    assert!(!model_check(&ts, &prop("<-><-> false")).unwrap().holds);
    let ts = six();
    assert!(!model_check(&ts, &prop("<-><-> false")).unwrap().holds);
}

#[test]
fn identity_fixpoints() {
    let ts = six();
    assert!(agree(&ts, &prop("mu Z. Z")).is_empty());
    assert_eq!(agree(&ts, &prop("nu Z. Z")).len(), 6);
}

#[test]
fn failing_box_has_counterexample() {
    let ts = six();
    let f = prop("[-][-] exists ?x. Goal(?x)");
    let r = model_check(&ts, &f).unwrap();
    assert!(!r.holds);
    assert_eq!(r.witness.unwrap().path, vec![0, 1, 2]);
}

#[test]
fn failing_invariant_gives_lasso() {
    // s4 loops forever without reaching s0
    let ts = six();
    let f = prop("nu Z. mu Y. (exists ?x. Goal(?x)) | [-][-] Y");
    assert!(model_check(&ts, &f).unwrap().holds);
    let g = prop("mu Y. !(exists ?x. Goal(?x)) & [-][-] Y");
    let r = model_check(&ts, &g).unwrap();
    assert!(!r.holds);
    let w = r.witness.unwrap();
    assert_eq!(w.path, vec![0, 3, 4]);
    let h = prop("nu Z. !(exists ?x. Goal(?x)) & [-][-] Z");
    let r = model_check(&ts, &h).unwrap();
    assert!(!r.holds);
    assert_eq!(r.witness.unwrap().path, vec![0, 3, 4]);
}

#[test]
fn lasso_for_failing_liveness() {
    // from s4 the run loops without ever reaching the Done state
    let ts = hand_ts(6, &[], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 4)]);
    let f = prop("mu Y. (exists ?x. Goal(?x)) | [-][-] Y");
    let r = model_check(&ts, &f).unwrap();
    assert!(!r.holds);
    let w = r.witness.unwrap();
    assert_eq!(w.path, vec![0, 1, 2, 3, 4, 5, 4]);
    assert_eq!(w.loop_to, Some(4));
}

#[test]
fn quantifier_binding_is_reported() {
    let ts = six();
    let f = prop("exists ?x. mu Y. Goal(?x) | <-><-> Y");
    let r = model_check(&ts, &f).unwrap();
    assert!(r.holds);
    assert_eq!(
        r.witness.unwrap().bindings,
        vec![("x".to_string(), "a".to_string())]
    );
}

#[test]
fn dualities_on_hand_system() {
    let ts = six();
    let goal = "(exists ?x. Goal(?x))";
    let pairs = [
        (format!("<-><-> {goal}"), format!("![-][-] !{goal}")),
        (format!("[-]<-> {goal}"), format!("!<->[-] !{goal}")),
        (
            format!("nu Z. {goal} & [-][-] Z"),
            format!("!(mu Z. !({goal} & [-][-] !Z))"),
        ),
    ];
    for (a, b) in pairs {
        assert_eq!(agree(&ts, &prop(&a)), agree(&ts, &prop(&b)), "{a} vs {b}");
    }
}

#[test]
fn context_root_on_retail() {
    let ts = build(&spec(RETAIL), &BuildConfig::default()).unwrap();
    let ext = extension(&ts, &prop("S:AS"), &Valuation::new(), &FixValuation::new()).unwrap();
    assert_eq!(ext.len(), ts.len());
    let stable = ts.states().iter().filter(|s| s.is_stable()).count();
    assert_eq!(
        ext.iter().filter(|&s| ts.state(s).is_stable()).count(),
        stable
    );
}

#[test]
fn retail_properties_agree_with_oracle() {
    let ts = build(&spec(RETAIL), &BuildConfig::default()).unwrap();
    let text = include_str!("../../../../specs/retail.mu");
    let fs = crate::dsl::parse_properties(text).unwrap().value;
    let verdicts: Vec<bool> = fs
        .iter()
        .map(|f| {
            agree(&ts, f);
            model_check(&ts, f).unwrap().holds
        })
        .collect();
    assert_eq!(verdicts, vec![true, true, true]);
}

#[test]
fn non_monotone_body_is_rejected() {
    let ts = six();
    let f = MuFormula::mu("Z", MuFormula::not(MuFormula::var("Z")));
    let err = extension(&ts, &f, &Valuation::new(), &FixValuation::new()).unwrap_err();
    assert!(matches!(err, CheckError::NonMonotone(_)), "{err}");
}

#[test]
fn oracle_size_cap() {
    let ts = six();
    let cfg = OracleConfig {
        max_states: 5,
        ..OracleConfig::default()
    };
    assert!(brute_force_extension(&ts, &MuFormula::True, &Valuation::new(), cfg).is_err());
}

#[test]
fn result_serializes() {
    let ts = six();
    let r = model_check(&ts, &prop("<-><-> true")).unwrap();
    let j = serde_json::to_value(&r).unwrap();
    assert_eq!(j["holds"], true);
    assert_eq!(j["extent"], serde_json::json!([0, 3, 4, 5]));
}
