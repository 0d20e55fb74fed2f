//! μL_C model checking over a finite transition system.

mod eval;
mod formula;
pub mod oracle;
mod stateset;
mod witness;

pub use eval::{
    extension, model_check, CheckError, CheckResult, FixValuation, ModelChecker, SubformulaExtent,
    Valuation,
};
pub use formula::{MuFormula, StepPair};
pub use stateset::StateSet;
pub use witness::Witness;

#[cfg(test)]
mod tests;
