use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{content_digest, Incompleteness, Phase, StateId, SystemState, TransitionSystem};
use crate::context::ContextSchema;
use crate::kb::ContextualizedTBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!(
                "unknown export format `{other}` (expected dot or json)"
            )),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("malformed transition system: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format tag `{0}`")]
    Format(String),
    #[error("state {0} listed out of order")]
    Order(StateId),
    #[error("state {0} has digest {1}, content hashes to {2}")]
    Digest(StateId, String, String),
    #[error(transparent)]
    Structure(#[from] super::TsError),
}

const FORMAT_TAG: &str = "ckab-ts/1";

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    from: StateId,
    to: StateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TsJson {
    format: String,
    spec_digest: String,
    initial: StateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    incomplete: Option<Incompleteness>,
    schema: ContextSchema,
    ctbox: ContextualizedTBox,
    states: Vec<SystemState>,
    transitions: Vec<EdgeJson>,
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl TransitionSystem {
    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Dot => self.to_dot(),
            ExportFormat::Json => self.to_json(),
        }
    }

    /// Stable states solid, intermediate states dashed; labels show the
    /// context and the ABox size.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ts {\n  node [shape=box];\n");
        for s in &self.states {
            let style = match s.phase {
                Phase::Stable => "solid",
                Phase::Intermediate => "dashed",
            };
            let size = s.abox.iter().filter(|f| !f.is_marker()).count();
            let extra = if s.id == self.initial {
                ", penwidth=2"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  s{} [label=\"s{}\\n{}\\n|A|={}\", style={style}{extra}];",
                s.id,
                s.id,
                dot_escape(&s.ctx.to_string()),
                size
            );
        }
        for (a, b) in self.edges() {
            match self.label(a, b) {
                Some(l) => {
                    let _ = writeln!(out, "  s{a} -> s{b} [label=\"{}\"];", dot_escape(l));
                }
                None => {
                    let _ = writeln!(out, "  s{a} -> s{b};");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let doc = TsJson {
            format: FORMAT_TAG.to_string(),
            spec_digest: self.spec_digest.clone(),
            initial: self.initial,
            incomplete: self.incomplete.clone(),
            schema: self.schema.clone(),
            ctbox: self.ctbox.clone(),
            states: self.states.clone(),
            transitions: self
                .edges()
                .map(|(from, to)| EdgeJson {
                    from,
                    to,
                    label: self.label(from, to).map(str::to_string),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable transition system")
    }

    /// Reads the output of [`TransitionSystem::to_json`].
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        let doc: TsJson = serde_json::from_str(text)?;
        if doc.format != FORMAT_TAG {
            return Err(LoadError::Format(doc.format));
        }
        for (i, s) in doc.states.iter().enumerate() {
            if s.id != i {
                return Err(LoadError::Order(s.id));
            }
            let d = content_digest(s.phase, &s.ctx, &s.abox, &s.scmap);
            if d != s.digest {
                return Err(LoadError::Digest(s.id, s.digest.clone(), d));
            }
        }
        let mut ts = TransitionSystem::empty(
            doc.schema,
            doc.ctbox,
            doc.spec_digest,
            doc.states,
            doc.initial,
        )?;
        for e in doc.transitions {
            ts.add_edge(e.from, e.to, e.label)?;
        }
        ts.incomplete = doc.incomplete;
        Ok(ts)
    }
}
