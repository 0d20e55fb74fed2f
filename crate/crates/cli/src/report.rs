use std::fmt::{self, Write};

use ckab::checker::{SubformulaExtent, Witness};
use ckab::statespace::{AcyclicityReport, Incompleteness, TsStats};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    /// The transition system is only a prefix of the real one.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub state_cap: usize,
    pub bound: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub line: usize,
    pub formula: String,
    pub verdict: Verdict,
    /// Whether the formula holds on the states that were built.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds_on_prefix: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub subformulas: Vec<SubformulaExtent>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub build_ms: u128,
    pub check_ms: u128,
}

/// Everything `check` found, in a stable order.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub spec: String,
    pub spec_digest: String,
    pub config: ConfigEcho,
    pub analysis: AcyclicityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<TsStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incomplete: Option<Incompleteness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_bound: Option<String>,
    pub properties: Vec<PropertyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spec: {} (sha256 {})", self.spec, self.spec_digest);
        let bound = self
            .config
            .bound
            .map_or("none".to_string(), |b| b.to_string());
        let _ = writeln!(
            out,
            "config: k={} state-cap={} bound={bound}",
            self.config.k, self.config.state_cap
        );
        let _ = writeln!(out, "analysis: {}", self.analysis);
        if let Some(s) = &self.stats {
            let _ = writeln!(
                out,
                "states: {} ({} stable, {} intermediate), edges: {}, dead ends: {}",
                s.states, s.stable, s.intermediate, s.edges, s.dead_ends
            );
        }
        if let Some(inc) = &self.incomplete {
            let _ = writeln!(
                out,
                "incomplete: state cap {} reached with {} unexpanded states",
                inc.state_cap,
                inc.unexpanded.len()
            );
        }
        if let Some(rb) = &self.run_bound {
            let _ = writeln!(out, "incomplete: {rb}");
        }
        for (i, p) in self.properties.iter().enumerate() {
            let _ = writeln!(out, "property {} (line {}): {}", i + 1, p.line, p.verdict);
            let _ = writeln!(out, "  {}", p.formula);
            if let Some(h) = p.holds_on_prefix {
                let v = if h { "holds" } else { "fails" };
                let _ = writeln!(out, "  on the explored prefix: {v}");
            }
            if let Some(w) = &p.witness {
                let _ = writeln!(out, "  witness: {w}");
            }
        }
        if let Some(t) = &self.timings {
            let _ = writeln!(
                out,
                "timings: build {} ms, check {} ms",
                t.build_ms, t.check_ms
            );
        }
        out
    }
}
