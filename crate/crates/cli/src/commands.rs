use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use ckab::checker::ModelChecker;
use ckab::dsl::{self, CkabSpec, Diagnostic, Pos};
use ckab::engine::{HashBackend, ServiceBackend};
use ckab::statespace::{self, BuildConfig, BuildError, ExportFormat, TraceStep, THREADS_VAR};

use crate::report::{ConfigEcho, PropertyReport, RunReport, Timings, Verdict};
use crate::{services, CliError, Command, Exit};

pub(crate) fn dispatch(
    cmd: Command,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit, CliError> {
    match cmd {
        Command::Validate { spec } => {
            load_spec(&spec, err)?;
            Ok(Exit::Ok)
        }
        Command::Analyze { spec, json } => analyze(&spec, json, out, err),
        Command::Check {
            spec,
            properties,
            k,
            state_cap,
            bound,
            export,
            json,
            timings,
        } => {
            let opts = CheckOptions {
                k,
                state_cap,
                bound,
                export,
                json,
                timings,
            };
            check(&spec, &properties, &opts, out, err)
        }
        Command::Simulate {
            spec,
            steps,
            services,
            seed,
            json,
        } => simulate(&spec, steps, &services, seed, json, out, err),
    }
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str, path: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io(path, e))
}

fn warn(err: &mut dyn Write, file: &str, warnings: &[Diagnostic]) {
    for w in warnings {
        let _ = writeln!(err, "{}", w.render(file));
    }
}

fn load_spec(path: &str, err: &mut dyn Write) -> Result<CkabSpec, CliError> {
    let text = read(path)?;
    let parsed = dsl::parse_spec(&text).map_err(|d| CliError::spec(path, d))?;
    warn(err, path, &parsed.warnings);
    Ok(parsed.value)
}

fn analyze(
    path: &str,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit, CliError> {
    let spec = load_spec(path, err)?;
    let report = statespace::check_weak_acyclicity(&spec);
    let text = if json {
        serde_json::to_string_pretty(&report).expect("serializable report") + "\n"
    } else {
        format!("{report}\n")
    };
    emit(out, &text, "<stdout>")?;
    Ok(if report.weakly_acyclic {
        Exit::Ok
    } else {
        Exit::NotWeaklyAcyclic
    })
}

struct CheckOptions {
    k: Option<usize>,
    state_cap: usize,
    bound: Option<usize>,
    export: Option<String>,
    json: bool,
    timings: bool,
}

fn threads() -> Result<Option<usize>, CliError> {
    statespace::threads_from_env().map_err(|m| CliError::usage(THREADS_VAR, m))
}

fn export_format(path: &str) -> Result<ExportFormat, CliError> {
    let ext = Path::new(path)
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("");
    ext.parse()
        .map_err(|m: String| CliError::usage(path, format!("cannot export: {m}")))
}

fn build_error(path: &str, e: BuildError) -> CliError {
    match e {
        BuildError::Threads(m) => CliError::usage(THREADS_VAR, m),
        other => CliError::spec_at(path, Pos::start(), other.to_string()),
    }
}

fn check(
    spec_path: &str,
    props_path: &str,
    opts: &CheckOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit, CliError> {
    let spec = load_spec(spec_path, err)?;
    let text = read(props_path)?;
    let parsed = dsl::parse_located_properties(&text).map_err(|d| CliError::spec(props_path, d))?;
    warn(err, props_path, &parsed.warnings);
    let props = parsed.value;
    let mut problems = Vec::new();
    for p in &props {
        problems.extend(
            dsl::validate_property(&spec, &p.value, p.pos)
                .into_iter()
                .filter(Diagnostic::is_error),
        );
    }
    if !problems.is_empty() {
        return Err(CliError::Spec {
            source_name: props_path.to_string(),
            diagnostics: problems,
        });
    }
    let threads = threads()?;
    let export = opts
        .export
        .as_deref()
        .map(|p| export_format(p).map(|f| (p, f)))
        .transpose()?;

    let extra_constants: BTreeSet<String> =
        props.iter().flat_map(|p| p.value.constants()).collect();
    let k = opts.k.unwrap_or_else(|| statespace::auto_k(&spec));
    let config = BuildConfig {
        k: Some(k),
        state_cap: opts.state_cap,
        bound: opts.bound,
        threads,
        extra_constants,
        ..BuildConfig::default()
    };
    let mut report = RunReport {
        spec: spec_path.to_string(),
        spec_digest: statespace::spec_digest(&spec),
        config: ConfigEcho {
            k,
            state_cap: opts.state_cap,
            bound: opts.bound,
        },
        analysis: statespace::check_weak_acyclicity(&spec),
        stats: None,
        incomplete: None,
        run_bound: None,
        properties: Vec::new(),
        timings: None,
    };
    let started = Instant::now();
    let built = statespace::build(&spec, &config);
    let build_ms = started.elapsed().as_millis();
    let started = Instant::now();
    let exit = match built {
        Err(BuildError::RunBound(v)) => {
            report.run_bound = Some(v.to_string());
            for p in &props {
                report.properties.push(PropertyReport {
                    line: p.pos.line,
                    formula: dsl::print_formula(&p.value),
                    verdict: Verdict::Inconclusive,
                    holds_on_prefix: None,
                    witness: None,
                    subformulas: Vec::new(),
                });
            }
            Exit::Inconclusive
        }
        Err(e) => return Err(build_error(spec_path, e)),
        Ok(ts) => {
            if let Some((path, fmt)) = export {
                std::fs::write(path, ts.export(fmt)).map_err(|e| CliError::io(path, e))?;
            }
            report.stats = Some(ts.stats());
            report.incomplete = ts.incompleteness().cloned();
            let complete = ts.is_complete();
            let mut mc = ModelChecker::new(&ts)
                .map_err(|e| CliError::spec_at(spec_path, Pos::start(), e.to_string()))?;
            let mut all_hold = true;
            for p in &props {
                let r = mc
                    .check(&p.value)
                    .map_err(|e| CliError::spec_at(props_path, p.pos, e.to_string()))?;
                all_hold &= r.holds;
                let verdict = match (complete, r.holds) {
                    (false, _) => Verdict::Inconclusive,
                    (true, true) => Verdict::Holds,
                    (true, false) => Verdict::Fails,
                };
                report.properties.push(PropertyReport {
                    line: p.pos.line,
                    formula: dsl::print_formula(&p.value),
                    verdict,
                    holds_on_prefix: (!complete).then_some(r.holds),
                    witness: r.witness,
                    subformulas: r.subformulas,
                });
            }
            match (complete, all_hold) {
                (false, _) => Exit::Inconclusive,
                (true, true) => Exit::Ok,
                (true, false) => Exit::Fails,
            }
        }
    };
    if opts.timings {
        report.timings = Some(Timings {
            build_ms,
            check_ms: started.elapsed().as_millis(),
        });
    }
    let text = if opts.json {
        report.to_json()
    } else {
        report.to_text()
    };
    emit(out, &text, "<stdout>")?;
    Ok(exit)
}

fn backend(
    spec: &str,
    services: &str,
    seed: u64,
) -> Result<(Arc<dyn ServiceBackend>, String), CliError> {
    if services == "hash" {
        return Ok((
            Arc::new(HashBackend::new(seed, Vec::new())),
            spec.to_string(),
        ));
    }
    match services.strip_prefix("table:") {
        Some(path) => {
            let table = services::parse_service_table(path, &read(path)?)?;
            Ok((Arc::new(table), path.to_string()))
        }
        None => Err(CliError::usage(
            "--services",
            format!("unknown service backend `{services}` (expected hash or table:PATH)"),
        )),
    }
}

fn trace_text(trace: &[TraceStep]) -> String {
    let mut out = String::new();
    for (i, step) in trace.iter().enumerate() {
        let _ = writeln!(
            out,
            "step {i}: {}",
            step.action.as_deref().unwrap_or("initial")
        );
        let _ = writeln!(out, "  context: {}", step.ctx);
        let _ = writeln!(out, "  abox: {}", step.abox);
        let _ = writeln!(out, "  services: {}", step.scmap);
    }
    out
}

fn simulate(
    spec_path: &str,
    steps: usize,
    services: &str,
    seed: u64,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit, CliError> {
    let spec = load_spec(spec_path, err)?;
    let (backend, source) = backend(spec_path, services, seed)?;
    let trace = statespace::simulate(&spec, backend, steps, seed).map_err(|e| match e {
        BuildError::Service(s) => CliError::spec_at(source, Pos::start(), s.to_string()),
        other => build_error(spec_path, other),
    })?;
    let text = if json {
        serde_json::to_string_pretty(&trace).expect("serializable trace") + "\n"
    } else {
        trace_text(&trace)
    };
    emit(out, &text, "<stdout>")?;
    Ok(Exit::Ok)
}
