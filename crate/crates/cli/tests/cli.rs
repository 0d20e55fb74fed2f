use std::path::PathBuf;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn spec(name: &str) -> String {
    root().join("specs").join(name).display().to_string()
}

fn run(args: &[&str]) -> (u8, String, String) {
    let mut argv = vec!["ckab".to_string()];
    argv.extend(args.iter().map(|a| a.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = ckab_cli::run(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// Whether some line of `err` is an error diagnostic starting with `prefix`.
fn has_error(err: &str, prefix: &str) -> bool {
    err.lines()
        .any(|l| l.starts_with(prefix) && l.contains(": error: "))
}

fn temp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("ckab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_accepts_the_corpus() {
    for name in [
        "retail.ckab",
        "retail_delivered.ckab",
        "retail_stuck.ckab",
        "retail_nocalls.ckab",
    ] {
        let (code, _, err) = run(&["validate", &spec(name)]);
        assert_eq!(code, 0, "{name}: {err}");
    }
}

#[test]
fn validate_reports_positioned_errors() {
    let text = std::fs::read_to_string(spec("retail.ckab"))
        .unwrap()
        .replace("S: AS(PS(WH), NS, LS)", "S: AS(PS(WH), NS, LS)\n  S: AS(X)");
    let path = temp("dup.ckab", &text);
    let (code, _, err) = run(&["validate", &path]);
    assert_eq!(code, 65);
    assert!(err.starts_with(&format!("{path}:")), "{err}");
    assert!(err.contains(": error: "), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let (code, _, err) = run(&["validate", "/nonexistent/x.ckab"]);
    assert_eq!(code, 66);
    assert!(err.starts_with("/nonexistent/x.ckab:1:1: error: "), "{err}");
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["frobnicate"]).0, 64);
    assert_eq!(run(&["check", &spec("retail.ckab")]).0, 64);
    assert_eq!(run(&["--help"]).0, 0);
    let props = temp("true.mu", "true");
    let (code, _, err) = run(&[
        "check",
        &spec("retail.ckab"),
        &props,
        "--export",
        "/tmp/ts.png",
    ]);
    assert_eq!(code, 64);
    assert!(err.contains("/tmp/ts.png:1:1: error: "), "{err}");
}

#[test]
fn analyze_finds_the_time_to_delivery_cycle() {
    let (code, out, _) = run(&["analyze", &spec("retail.ckab")]);
    assert_eq!(code, 2);
    assert_eq!(out, "not weakly acyclic: cycle hasTTD.2 -> hasTTD.2\n");
    let (code, out, _) = run(&["analyze", &spec("retail_nocalls.ckab"), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["weakly_acyclic"], true);
}

#[test]
fn check_exit_codes() {
    let props = temp("true.mu", "true");
    assert_eq!(run(&["check", &spec("retail.ckab"), &props]).0, 0);
    let props = temp("false.mu", "true; false");
    assert_eq!(run(&["check", &spec("retail.ckab"), &props]).0, 1);
    let (code, out, _) = run(&[
        "check",
        &spec("retail.ckab"),
        &spec("retail.mu"),
        "--state-cap",
        "1",
    ]);
    assert_eq!(code, 3);
    assert!(out.contains("inconclusive"), "{out}");
    let (code, out, _) = run(&["check", &spec("retail.ckab"), &props, "--bound", "6"]);
    assert_eq!(code, 3);
    assert!(out.contains("run bound 6 reached"), "{out}");
}

#[test]
fn check_rejects_unknown_vocabulary_in_properties() {
    let props = temp("bad.mu", "true;\nexists ?x. Shipped(?x)");
    let (code, _, err) = run(&["check", &spec("retail.ckab"), &props]);
    assert_eq!(code, 65);
    assert!(has_error(&err, &format!("{props}:2:")), "{err}");
}

#[test]
fn check_verdicts_on_the_variants() {
    let (code, out, _) = run(&[
        "check",
        &spec("retail_delivered.ckab"),
        &spec("retail.mu"),
        "--json",
    ]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["properties"][0]["verdict"], "holds");
    assert!(v.get("timings").is_none());

    let (code, out, _) = run(&["check", &spec("retail_stuck.ckab"), &spec("retail.mu")]);
    assert_eq!(code, 1);
    assert!(out.contains("property 1 (line 3): fails"), "{out}");
    assert!(out.contains("(loop) with ?x=o2"), "{out}");
}

#[test]
fn check_exports_the_transition_system() {
    let props = temp("true.mu", "true");
    let dot = temp("ts.dot", "");
    let json = temp("ts.json", "");
    assert_eq!(
        run(&["check", &spec("retail.ckab"), &props, "--export", &dot]).0,
        0
    );
    assert_eq!(
        run(&["check", &spec("retail.ckab"), &props, "--export", &json]).0,
        0
    );
    let dot = std::fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph ts {"));
    let ts = ckab::statespace::TransitionSystem::from_json(&std::fs::read_to_string(json).unwrap())
        .unwrap();
    assert_eq!(ts.len(), 66);
}

#[test]
fn simulate_matches_the_golden_trace() {
    let table = format!("table:{}", spec("retail.services"));
    let (code, out, err) = run(&[
        "simulate",
        &spec("retail.ckab"),
        "--steps",
        "3",
        "--services",
        &table,
        "--seed",
        "2",
    ]);
    assert_eq!(code, 0, "{err}");
    let golden = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/retail_table_seed2.trace"),
    )
    .unwrap();
    assert_eq!(out, golden);
}

#[test]
fn simulate_zero_steps_is_the_initial_state() {
    let (code, out, _) = run(&["simulate", &spec("retail.ckab"), "--steps", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("step ")).count(), 1);
}

#[test]
fn simulate_with_hash_services_is_repeatable() {
    let args = [
        "simulate",
        &spec("retail.ckab"),
        "--steps",
        "12",
        "--seed",
        "7",
        "--json",
    ];
    let first = run(&args);
    assert_eq!(first.0, 0);
    assert_eq!(run(&args), first);
}

#[test]
fn simulate_without_a_table_entry_fails_at_the_table() {
    let table = temp("short.services", "newTTD(w1, t5) = t7\n");
    let (code, _, err) = run(&[
        "simulate",
        &spec("retail.ckab"),
        "--steps",
        "10",
        "--services",
        &format!("table:{table}"),
        "--seed",
        "3",
    ]);
    assert_eq!(code, 65);
    assert!(
        err.lines()
            .any(|l| l == format!("{table}:1:1: error: no value for service call newTTD(w1, t7)")),
        "{err}"
    );
}

// the only test touching the environment, so parallel tests never see it
#[test]
fn thread_count_from_the_environment() {
    let args = ["check", &spec("retail.ckab"), &spec("retail.mu"), "--json"];
    let first = run(&args);
    for threads in ["1", "3"] {
        std::env::set_var("CKAB_THREADS", threads);
        assert_eq!(run(&args), first);
    }
    std::env::set_var("CKAB_THREADS", "zero");
    let (code, _, err) = run(&args);
    std::env::remove_var("CKAB_THREADS");
    assert_eq!(code, 64);
    assert!(has_error(&err, "CKAB_THREADS:1:1: error: "), "{err}");
}
