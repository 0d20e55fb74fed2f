use ckab::dsl::{Diagnostic, Diagnostics, Pos};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok,
    /// Some property fails.
    Fails,
    /// The specification is not weakly acyclic.
    NotWeaklyAcyclic,
    /// The transition system is incomplete, so verdicts are inconclusive.
    Inconclusive,
    Usage,
    Spec,
    Io,
}

impl Exit {
    pub fn code(self) -> u8 {
        match self {
            Exit::Ok => 0,
            Exit::Fails => 1,
            Exit::NotWeaklyAcyclic => 2,
            Exit::Inconclusive => 3,
            Exit::Usage => 64,
            Exit::Spec => 65,
            Exit::Io => 66,
        }
    }
}

/// Errors rendered as positioned diagnostics against the input they concern.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", render(.source_name, .diagnostics))]
    Usage {
        source_name: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("{}", render(.source_name, .diagnostics))]
    Spec {
        source_name: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("{path}:1:1: error: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn render(name: &str, ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| d.render(name))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    pub fn usage(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Usage {
            source_name: source_name.into(),
            diagnostics: vec![Diagnostic::error(Pos::start(), message)],
        }
    }

    pub fn spec(source_name: impl Into<String>, diagnostics: Diagnostics) -> Self {
        CliError::Spec {
            source_name: source_name.into(),
            diagnostics: diagnostics.0,
        }
    }

    pub fn spec_at(source_name: impl Into<String>, pos: Pos, message: impl Into<String>) -> Self {
        CliError::Spec {
            source_name: source_name.into(),
            diagnostics: vec![Diagnostic::error(pos, message)],
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage { .. } => Exit::Usage,
            CliError::Spec { .. } => Exit::Spec,
            CliError::Io { .. } => Exit::Io,
        }
    }
}
