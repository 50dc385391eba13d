//! Glossary-driven replacement of presentation LaTeX by semantic macros.

mod engine;
mod glossary;
mod pattern;
mod stats;
mod template;

pub use glossary::{Glossary, GlossaryFile, MacroRule, RuleMatch, RuleSpec};
pub use pattern::{AtomSpec, CaptureMode, Captures, PatternAtom};
pub use stats::ReplacementStats;
pub use template::AtVariant;
