use std::fmt;

use super::build_symbols_list;
use crate::macros::{Glossary, ReplacementStats};
use crate::metadata::{AnnotationKind, Formula, SubstitutionDef};

/// Corpus totals of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub pages: usize,
    pub stats: ReplacementStats,
    pub defs: usize,
    /// Pages carrying at least one substitution annotation.
    pub annotated: usize,
    pub nonempty_symbols: usize,
    /// Formula- and file-level problems, one line each.
    pub issues: Vec<String>,
}

impl Report {
    pub fn symbols_percentage(&self) -> f64 {
        if self.pages == 0 {
            0.0
        } else {
            100.0 * self.nonempty_symbols as f64 / self.pages as f64
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pages: {}", self.pages)?;
        writeln!(f, "formulae: {}", self.stats.formulae)?;
        writeln!(
            f,
            "formulae with replacements: {}",
            self.stats.formulae_touched
        )?;
        writeln!(f, "replacements by macro:")?;
        for (name, n) in &self.stats.per_rule {
            writeln!(f, "  {name}: {n}")?;
        }
        writeln!(f, "total replacements: {}", self.stats.total)?;
        writeln!(
            f,
            "average per formula: {:.2}",
            self.stats.avg_per_formula()
        )?;
        writeln!(
            f,
            "substitution definitions: {} (removed from pages, attached as annotations)",
            self.defs
        )?;
        writeln!(f, "formulae with substitutions: {}", self.annotated)?;
        writeln!(
            f,
            "non-empty symbols lists: {}/{} ({:.2}%)",
            self.nonempty_symbols,
            self.pages,
            self.symbols_percentage()
        )?;
        writeln!(f, "errors: {}", self.issues.len())?;
        for i in &self.issues {
            writeln!(f, "  {i}")?;
        }
        Ok(())
    }
}

pub fn stats_report(
    stats: &ReplacementStats,
    fs: &[Formula],
    defs: &[SubstitutionDef],
    g: &Glossary,
) -> Report {
    Report {
        pages: fs.len(),
        stats: stats.clone(),
        defs: defs.len(),
        annotated: fs
            .iter()
            .filter(|f| f.has(AnnotationKind::Substitution))
            .count(),
        nonempty_symbols: fs
            .iter()
            .filter(|f| !build_symbols_list(f, g).is_empty())
            .count(),
        issues: Vec::new(),
    }
}
