//! Formula home pages: symbols lists, Wikitext, the MediaWiki XML dump and
//! the run report.

mod dump;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::PageError;
use crate::lexer::{build_groups, tokenize};
use crate::macros::Glossary;
use crate::metadata::{AnnotationKind, Formula};

pub use dump::{emit_dump, SiteInfo, WikiDump};
pub use report::{stats_report, Report};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolsListEntry {
    pub macro_name: String,
    pub rendered_form: String,
    pub definition_link: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaPage {
    pub title: String,
    pub wikitext: String,
    pub formula_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibEntry {
    pub authors: String,
    pub title: String,
    #[serde(default)]
    pub publisher: String,
    #[serde(default)]
    pub year: Option<u32>,
    #[serde(default)]
    pub url: Option<String>,
}

impl BibEntry {
    /// A book citation followed by the equation tag.
    pub fn cite(&self, tag: &str) -> String {
        let mut s = format!("{}, ''{}''", self.authors, self.title);
        if !self.publisher.is_empty() {
            let _ = write!(s, ", {}", self.publisher);
        }
        if let Some(y) = self.year {
            let _ = write!(s, ", {y}");
        }
        if let Some(url) = &self.url {
            let _ = write!(s, ", [{url} {url}]");
        }
        let _ = write!(s, ", equation ({tag})");
        s
    }
}

/// Citation keys to book metadata.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bibliography(pub BTreeMap<String, BibEntry>);

const SHIPPED_BIB: &str = include_str!("../../data/bibliography.json");

impl Bibliography {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(std::io::Error::other)
    }

    pub fn shipped() -> Self {
        Self::from_json(SHIPPED_BIB).expect("bundled bibliography is valid")
    }

    pub fn get(&self, key: &str) -> Result<&BibEntry, PageError> {
        self.0
            .get(key)
            .ok_or_else(|| PageError::MissingBibEntry(key.to_owned()))
    }
}

/// Glossary macros called in `latex`. Text that does not form balanced
/// groups yields nothing.
fn macros_in(latex: &str, g: &Glossary, into: &mut BTreeSet<String>) {
    if let Ok(t) = build_groups(&tokenize(latex)) {
        into.extend(g.semantic_calls(&t.nodes));
    }
}

/// Every glossary macro used by the formula or its annotations, sorted by
/// name, once each.
pub fn build_symbols_list(f: &Formula, g: &Glossary) -> Vec<SymbolsListEntry> {
    let mut names = BTreeSet::new();
    names.extend(g.semantic_calls(&f.semantic.tree.nodes));
    for a in &f.annotations {
        macros_in(&a.body, g, &mut names);
    }
    names
        .into_iter()
        .filter_map(|n| g.rule(&n))
        .map(|r| SymbolsListEntry {
            macro_name: r.macro_name.clone(),
            rendered_form: r.sample_form(),
            definition_link: r.link(),
            description: r.description.clone(),
        })
        .collect()
}

pub fn page_title(corpus: &str, id: &str) -> String {
    format!("Formula:{corpus}:{id}")
}

/// Turns `$...$` in prose into math tags.
fn prose_to_wikitext(s: &str) -> String {
    let mut out = String::new();
    let mut in_math = false;
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' if chars.peek() == Some(&'$') => {
                out.push(c);
                out.push(chars.next().unwrap_or('$'));
            }
            '$' => {
                out.push_str(if in_math { "</math>" } else { "<math>" });
                in_math = !in_math;
            }
            _ => out.push(c),
        }
    }
    if in_math {
        out.push_str("</math>");
    }
    out
}

fn link(target: &str, text: &str) -> String {
    if target.starts_with("http://") || target.starts_with("https://") {
        format!("<span class=\"plainlinks\">[{target} {text}]</span>")
    } else {
        format!("[[{target}|{text}]]")
    }
}

/// Wikitext for one formula home page.
pub fn render_page(
    f: &Formula,
    g: &Glossary,
    bib: &Bibliography,
    corpus: &str,
) -> Result<FormulaPage, PageError> {
    let entry = bib.get(&f.citation.key)?;
    let mut w = String::new();
    if let Some(name) = f.annotations_of(AnnotationKind::Name).next() {
        let _ = writeln!(w, "'''{}'''\n", name.body);
    }
    let _ = writeln!(w, "<math id=\"{}\">{}</math>", f.id, f.source_semantic);

    let section = |w: &mut String, title: &str, lines: Vec<String>| {
        if !lines.is_empty() {
            let _ = writeln!(w, "\n== {title} ==");
            for l in lines {
                let _ = writeln!(w, "{l}");
            }
        }
    };
    let bodies = |kind| {
        f.annotations_of(kind)
            .map(|a| a.body.as_str())
            .collect::<Vec<_>>()
    };
    section(
        &mut w,
        "Constraints",
        bodies(AnnotationKind::Constraint)
            .iter()
            .map(|b| format!("* <math>{b}</math>"))
            .collect(),
    );
    section(
        &mut w,
        "Substitutions",
        bodies(AnnotationKind::Substitution)
            .iter()
            .map(|b| format!("* <math>{b}</math>"))
            .collect(),
    );
    section(
        &mut w,
        "Proof",
        bodies(AnnotationKind::Proof)
            .iter()
            .map(|b| prose_to_wikitext(b))
            .collect(),
    );
    section(
        &mut w,
        "Notes",
        bodies(AnnotationKind::Note)
            .iter()
            .map(|b| prose_to_wikitext(b))
            .collect(),
    );
    section(
        &mut w,
        "Symbols List",
        build_symbols_list(f, g)
            .into_iter()
            .map(|e| {
                let mut l = format!(
                    "* {} : {}",
                    link(
                        &e.definition_link,
                        &format!("<math>{}</math>", e.rendered_form)
                    ),
                    e.macro_name
                );
                if !e.description.is_empty() {
                    let _ = write!(l, " : {}", e.description);
                }
                l
            })
            .collect(),
    );
    section(
        &mut w,
        "Bibliography",
        vec![format!("* {}", entry.cite(&f.citation.tag))],
    );

    Ok(FormulaPage {
        title: page_title(corpus, &f.id),
        wikitext: w,
        formula_id: f.id.clone(),
    })
}

/// The primary formula of a rendered page.
pub fn primary_math(wikitext: &str) -> Option<&str> {
    let start = wikitext.find("<math id=\"")?;
    let body = &wikitext[start..];
    let open_end = body.find('>')? + 1;
    let close = body.find("</math>")?;
    Some(&body[open_end..close])
}

#[cfg(test)]
mod tests;
