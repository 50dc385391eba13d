//! Formula segmentation and rule-based metadata: constraints,
//! substitutions, names, proofs and notes.

mod constraints;
mod harvest;
mod outline;
mod segment;
mod substitutions;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canon::CanonicalTree;
use crate::error::ExtractError;
use crate::lexer::{MathEnv, SourceDocument, Span};
use crate::macros::{Glossary, ReplacementStats};

pub use constraints::{is_relational, split_constraint};
pub use substitutions::SubstitutionDef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnotationKind {
    Constraint,
    Substitution,
    Name,
    Proof,
    Note,
}

impl fmt::Display for AnnotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnnotationKind::Constraint => "constraint",
            AnnotationKind::Substitution => "substitution",
            AnnotationKind::Name => "name",
            AnnotationKind::Proof => "proof",
            AnnotationKind::Note => "note",
        })
    }
}

/// Where an annotation was harvested from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    Span(Span),
    Formula(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub kind: AnnotationKind,
    /// Semantic LaTeX for constraints and substitutions, prose otherwise.
    pub body: String,
    pub origin: Origin,
}

impl Annotation {
    pub fn new(kind: AnnotationKind, body: impl Into<String>, origin: Origin) -> Self {
        Self {
            kind,
            body: body.into(),
            origin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Citation {
    pub key: String,
    /// Equation tag in the cited work: the source label, else the formula id.
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub id: String,
    pub label: Option<String>,
    /// 1-based position among the display rows of the file.
    pub ordinal: usize,
    pub environment: MathEnv,
    pub span: Span,
    /// Raw row text.
    pub source: String,
    /// Sectional unit index; substitutions never cross units.
    pub unit: usize,
    /// Nearest enclosing heading.
    pub heading: Option<String>,
    /// Canonical form of the whole row.
    pub source_canonical: CanonicalTree,
    /// Semantic core: the replaced row minus any split-off constraint.
    pub semantic: CanonicalTree,
    pub source_semantic: String,
    pub citation: Citation,
    pub annotations: Vec<Annotation>,
    pub stats: ReplacementStats,
}

impl Formula {
    /// Adds `a` unless an annotation of the same kind and body is present.
    pub fn annotate(&mut self, a: Annotation) -> bool {
        if self
            .annotations
            .iter()
            .any(|b| b.kind == a.kind && b.body == a.body)
        {
            return false;
        }
        self.annotations.push(a);
        true
    }

    pub fn annotations_of(&self, kind: AnnotationKind) -> impl Iterator<Item = &Annotation> {
        self.annotations.iter().filter(move |a| a.kind == kind)
    }

    pub fn has(&self, kind: AnnotationKind) -> bool {
        self.annotations_of(kind).next().is_some()
    }

    pub(crate) fn set_semantic(&mut self, t: CanonicalTree) {
        self.source_semantic = t.to_latex();
        self.semantic = t;
    }
}

/// A formula that could not be processed; the rest of the file goes on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaIssue {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractorConfig {
    /// Relation keywords that name the following formulae.
    pub keywords: Vec<String>,
    /// First words of prose sentences that state constraints.
    pub introducers: Vec<String>,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        ExtractorConfig {
            keywords: s(&[
                "orthogonality",
                "recurrence relation",
                "generating function",
                "difference equation",
                "normalized recurrence relation",
                "forward shift",
                "backward shift",
                "Rodrigues-type formula",
                "limit relation",
                "definition",
            ]),
            introducers: s(&["where", "for", "provided"]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Segmentation {
    pub formulae: Vec<Formula>,
    pub issues: Vec<FormulaIssue>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Extraction {
    pub formulae: Vec<Formula>,
    pub defs: Vec<SubstitutionDef>,
    /// Definition formulae, kept as metadata only.
    pub removed: Vec<Formula>,
    pub issues: Vec<FormulaIssue>,
}

impl Extraction {
    pub fn stats(&self) -> ReplacementStats {
        let mut s = ReplacementStats::default();
        for f in self.formulae.iter().chain(&self.removed) {
            s += &f.stats;
        }
        s
    }
}

pub struct Extractor<'g> {
    pub glossary: &'g Glossary,
    pub config: ExtractorConfig,
}

impl<'g> Extractor<'g> {
    pub fn new(glossary: &'g Glossary, config: ExtractorConfig) -> Self {
        Self { glossary, config }
    }

    /// Segmentation followed by [`Extractor::process`].
    pub fn extract(
        &self,
        doc: &SourceDocument,
        citation_key: &str,
    ) -> Result<Extraction, ExtractError> {
        let seg = self.segment_formulae(doc, citation_key);
        let mut out = self.process(doc, seg.formulae)?;
        out.issues = seg.issues;
        Ok(out)
    }

    /// Runs the metadata stages over already segmented formulae. Running
    /// it again on its own output changes nothing.
    pub fn process(
        &self,
        doc: &SourceDocument,
        fs: Vec<Formula>,
    ) -> Result<Extraction, ExtractError> {
        let mut fs = fs;
        for f in &mut fs {
            let (core, constraints) = self.detect_constraints(f);
            if !constraints.is_empty() {
                f.set_semantic(core);
                for c in constraints {
                    f.annotate(c);
                }
            }
        }
        let defs = self.detect_substitutions(&fs);
        let (kept, removed) = self.inline_substitutions(fs, &defs)?;
        let formulae = self.harvest_names_and_notes(doc, kept);
        Ok(Extraction {
            formulae,
            defs,
            removed,
            issues: Vec::new(),
        })
    }
}
