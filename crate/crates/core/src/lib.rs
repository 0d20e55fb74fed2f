//! Verification engine for context-sensitive knowledge and action bases.

pub mod checker;
pub mod context;
pub mod dsl;
pub mod engine;
pub mod kb;
pub mod statespace;
