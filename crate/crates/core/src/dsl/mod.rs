//! Textual format for CKAB specifications (`.ckab`) and μL_C properties
//! (`.mu`): parsing, validation with positioned diagnostics, and printing.

mod build;
mod diag;
mod lexer;
mod parser;
mod printer;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::checker::MuFormula;
use crate::context::{ContextSchema, ContextState};
use crate::engine::{ActionSpec, CondActionRule, ContextEvolutionRule};
use crate::kb::{ABox, ContextualizedTBox};

pub use diag::{Diagnostic, Diagnostics, Located, Parsed, Pos, Severity};
pub use printer::{
    print_context_expr, print_ecq, print_formula, print_spec, print_tbox_assertion, print_ucq,
};
pub use validate::{check_formula, validate_property, validate_spec, SpecSpans};

/// A complete CKAB: context dimensions, contextualized TBox, initial ABox,
/// actions, condition-action rules, initial context and context-evolution
/// rules, plus declared vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkabSpec {
    pub schema: ContextSchema,
    /// Explicitly declared concept names (names in the TBox are implicit).
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub services: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
    pub ctbox: ContextualizedTBox,
    pub initial_abox: ABox,
    pub actions: Vec<ActionSpec>,
    pub process: Vec<CondActionRule>,
    pub initial_context: ContextState,
    pub context_rules: Vec<ContextEvolutionRule>,
}

impl CkabSpec {
    pub fn action(&self, name: &str) -> Option<&ActionSpec> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Concept and role names: declared ones plus those of the TBox.
    pub fn vocabulary(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let (mut cs, mut rs) = self.ctbox.vocabulary();
        cs.extend(self.concepts.iter().cloned());
        rs.extend(self.roles.iter().cloned());
        (cs, rs)
    }

    pub fn initial_adom(&self) -> BTreeSet<String> {
        self.initial_abox.adom()
    }
}

/// Parses and validates a `.ckab` document.
pub fn parse_spec(text: &str) -> Result<Parsed<CkabSpec>, Diagnostics> {
    build::spec_from_text(text)
}

/// Parses a single μL_C formula and checks it is closed and monotone.
pub fn parse_property(text: &str) -> Result<Parsed<MuFormula>, Diagnostics> {
    let parsed = parse_properties(text)?;
    let mut formulas = parsed.value;
    match formulas.len() {
        1 => Ok(Parsed {
            value: formulas.remove(0),
            warnings: parsed.warnings,
        }),
        n => Err(Diagnostics(vec![Diagnostic::error(
            Pos::start(),
            format!("expected exactly one property, found {n}"),
        )])),
    }
}

/// Parses a `.mu` document: formulas separated by `;`.
pub fn parse_properties(text: &str) -> Result<Parsed<Vec<MuFormula>>, Diagnostics> {
    let parsed = build::properties_from_text(text)?;
    Ok(Parsed {
        value: parsed.value.into_iter().map(|l| l.value).collect(),
        warnings: parsed.warnings,
    })
}

/// Like [`parse_properties`], keeping where each formula starts.
pub fn parse_located_properties(
    text: &str,
) -> Result<Parsed<Vec<Located<MuFormula>>>, Diagnostics> {
    build::properties_from_text(text)
}
