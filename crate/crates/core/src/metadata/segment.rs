use super::outline::{outline, Item};
use super::{Citation, Extractor, Formula, FormulaIssue, Segmentation};
use crate::lexer::{Node, SourceDocument, TokenTree};

/// Commands that only matter to the typesetter's numbering.
const NUMBERING: &[&str] = &["label", "nonumber", "notag"];

fn strip_numbering(nodes: &[Node]) -> Vec<Node> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut i = 0;
    while i < nodes.len() {
        match &nodes[i] {
            n if n.is_cs("label") => {
                i += 1;
                if matches!(nodes.get(i), Some(Node::Group { .. })) {
                    i += 1;
                }
                continue;
            }
            n if NUMBERING.iter().any(|c| n.is_cs(c)) => {}
            Node::Group {
                open,
                children,
                close,
            } => out.push(Node::Group {
                open: open.clone(),
                children: strip_numbering(children),
                close: close.clone(),
            }),
            leaf => out.push(leaf.clone()),
        }
        i += 1;
    }
    out
}

/// Unit index and nearest heading for every display math span.
pub(crate) fn units(doc: &SourceDocument) -> Vec<(usize, Option<String>)> {
    let mut out = vec![(0, None); doc.math.len()];
    let mut unit = 0;
    let mut section: Option<String> = None;
    let mut subsection: Option<String> = None;
    for item in outline(doc) {
        match item {
            Item::Heading { level, title } => {
                unit += 1;
                if level == 1 {
                    section = Some(title);
                    subsection = None;
                } else {
                    subsection = Some(title);
                }
            }
            Item::Display { math, .. } => {
                out[math] = (unit, subsection.clone().or_else(|| section.clone()))
            }
            _ => {}
        }
    }
    out
}

impl Extractor<'_> {
    /// One formula per display row, canonicalized and semantically
    /// replaced. Ids come from `\label`, else `f<ordinal>`. Rows that fail
    /// to canonicalize are reported and skipped; their ordinal is not reused.
    pub fn segment_formulae(&self, doc: &SourceDocument, citation_key: &str) -> Segmentation {
        let units = units(doc);
        let canon = self.glossary.canonicalizer();
        let mut seg = Segmentation::default();
        let mut ordinal = 0;
        for (m, span) in doc.math.iter().enumerate() {
            if !span.is_display() {
                continue;
            }
            ordinal += 1;
            let id = span.label.clone().unwrap_or_else(|| format!("f{ordinal}"));
            let body = TokenTree::new(strip_numbering(&span.body.nodes));
            let canonical = match canon.canonicalize(&body) {
                Ok(c) => c,
                Err(e) => {
                    seg.issues.push(FormulaIssue {
                        id,
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let (semantic, stats) = self.glossary.replace_all(&canonical);
            let (unit, heading) = units[m].clone();
            seg.formulae.push(Formula {
                citation: Citation {
                    key: citation_key.to_owned(),
                    tag: span.label.clone().unwrap_or_else(|| id.clone()),
                },
                id,
                label: span.label.clone(),
                ordinal,
                environment: span.environment,
                span: span.span,
                source: doc.text(span.span).to_owned(),
                unit,
                heading,
                source_canonical: canonical,
                source_semantic: semantic.to_latex(),
                semantic,
                annotations: Vec::new(),
                stats,
            });
        }
        seg
    }
}
