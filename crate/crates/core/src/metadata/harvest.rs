use std::collections::HashMap;

use super::constraints::is_relational;
use super::outline::{outline, Item, Sentence, MATH_MARK};
use super::{Annotation, AnnotationKind, Extractor, Formula, Origin};
use crate::lexer::SourceDocument;

/// The phrase naming a relation: the longest keyword found at word
/// boundaries, spelled as configured, followed by the rest of its clause.
pub(crate) fn keyword_phrase(plain: &str, keywords: &[String]) -> Option<String> {
    let lower = plain.to_ascii_lowercase();
    let boundary = |c: Option<char>| c.is_none_or(|c| !c.is_alphanumeric());
    let mut best: Option<(usize, &String)> = None;
    for kw in keywords {
        let needle = kw.to_ascii_lowercase();
        if needle.is_empty() || best.is_some_and(|(_, b)| b.len() >= kw.len()) {
            continue;
        }
        let hit = lower
            .match_indices(&needle)
            .map(|(pos, _)| pos)
            .find(|&pos| {
                boundary(lower[..pos].chars().next_back())
                    && boundary(lower[pos + needle.len()..].chars().next())
            });
        if let Some(pos) = hit {
            best = Some((pos, kw));
        }
    }
    let (pos, kw) = best?;
    let rest = &plain[pos + kw.len()..];
    let end = rest
        .find([',', ';', ':', '.', '!', '?', MATH_MARK])
        .unwrap_or(rest.len());
    Some(format!("{kw}{}", rest[..end].trim_end()))
}

struct Harvest<'a, 'g> {
    ex: &'a Extractor<'g>,
    doc: &'a SourceDocument,
    fs: Vec<Formula>,
    keyword: Option<String>,
    heading: Option<String>,
    notes: Vec<Annotation>,
    /// Most recent formula of the unit, if it survived inlining.
    last: Option<usize>,
    /// Formulae of the most recent display environment.
    env: Vec<usize>,
    after_display: bool,
}

impl Harvest<'_, '_> {
    fn inline_semantic(&self, m: usize) -> Option<crate::canon::CanonicalTree> {
        let body = &self.doc.math[m].body;
        let canon = self.ex.glossary.canonicalizer().canonicalize(body).ok()?;
        Some(self.ex.glossary.replace_all(&canon).0)
    }

    fn render(&self, s: &Sentence) -> String {
        s.render(|m| match self.inline_semantic(m) {
            Some(t) => t.to_latex(),
            None => self.doc.math[m].body.to_latex().trim().to_owned(),
        })
    }

    fn flush_notes(&mut self) {
        let notes = std::mem::take(&mut self.notes);
        if let Some(i) = self.last {
            for n in notes {
                self.fs[i].annotate(n);
            }
        }
    }

    /// Constraints stated in a prose sentence right after a display.
    fn prose_constraints(&self, s: &Sentence) -> Vec<Annotation> {
        let plain = s.plain();
        let first = plain
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_lowercase();
        if !self
            .ex
            .config
            .introducers
            .iter()
            .any(|w| w.to_lowercase() == first)
        {
            return Vec::new();
        }
        s.math()
            .filter_map(|m| {
                let t = self.inline_semantic(m)?;
                t.tree.nodes.iter().any(is_relational).then(|| {
                    Annotation::new(
                        AnnotationKind::Constraint,
                        t.to_latex(),
                        Origin::Span(self.doc.math[m].span),
                    )
                })
            })
            .collect()
    }

    fn sentence(&mut self, s: Sentence) {
        if self.after_display {
            self.after_display = false;
            let cs = self.prose_constraints(&s);
            if !cs.is_empty() {
                for &i in &self.env.clone() {
                    for c in &cs {
                        self.fs[i].annotate(c.clone());
                    }
                }
                return;
            }
        }
        if let Some(k) = keyword_phrase(&s.plain(), &self.ex.config.keywords) {
            self.keyword = Some(k);
            return;
        }
        let body = self.render(&s);
        self.notes.push(Annotation::new(
            AnnotationKind::Note,
            body,
            Origin::Span(s.span),
        ));
    }
}

impl Extractor<'_> {
    /// Names from the enclosing heading plus the latest relation keyword,
    /// notes from other prose, proofs from `% proof:` comments, and
    /// constraints from "where ..." sentences following a display.
    ///
    /// Prose before a formula annotates that formula; prose ending a unit
    /// annotates the unit's last formula.
    pub fn harvest_names_and_notes(&self, doc: &SourceDocument, fs: Vec<Formula>) -> Vec<Formula> {
        let by_start: HashMap<usize, usize> = fs
            .iter()
            .enumerate()
            .map(|(i, f)| (f.span.start, i))
            .collect();
        let mut h = Harvest {
            ex: self,
            doc,
            fs,
            keyword: None,
            heading: None,
            notes: Vec::new(),
            last: None,
            env: Vec::new(),
            after_display: false,
        };
        for item in outline(doc) {
            match item {
                Item::Heading { title, .. } => {
                    h.flush_notes();
                    h.last = None;
                    h.env.clear();
                    h.keyword = None;
                    h.after_display = false;
                    h.heading = Some(title);
                }
                Item::Break => h.after_display = false,
                Item::Sentence(s) => h.sentence(s),
                Item::Proof { text, span } => {
                    if let Some(i) = h.last {
                        h.fs[i].annotate(Annotation::new(
                            AnnotationKind::Proof,
                            text,
                            Origin::Span(span),
                        ));
                    }
                }
                Item::Display { math, new_env } => {
                    if new_env {
                        h.env.clear();
                    }
                    h.after_display = true;
                    let Some(&i) = by_start.get(&doc.math[math].span.start) else {
                        h.notes.clear();
                        h.last = None;
                        continue;
                    };
                    if let (Some(heading), Some(kw)) = (&h.heading, &h.keyword) {
                        let name = format!("{heading} {kw}");
                        let span = doc.math[math].span;
                        if !h.fs[i].has(AnnotationKind::Name) {
                            h.fs[i].annotate(Annotation::new(
                                AnnotationKind::Name,
                                name,
                                Origin::Span(span),
                            ));
                        }
                    }
                    for n in std::mem::take(&mut h.notes) {
                        h.fs[i].annotate(n);
                    }
                    h.last = Some(i);
                    h.env.push(i);
                }
            }
        }
        h.flush_notes();
        h.fs
    }
}
