//! The glossary: one rewrite rule per semantic macro, plus the
//! canonicalization tables.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pattern::{
    capture_names, compile, expand_atoms, match_seq, AtomSpec, Captures, PatNode, PatternAtom,
};
use super::template::{AtVariant, Template};
use crate::canon::{CanonConfig, Canonicalizer};
use crate::error::GlossaryError;
use crate::lexer::Node;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub name: String,
    #[serde(default)]
    pub priority: i32,
    pub pattern: Vec<AtomSpec>,
    pub template: String,
    pub at: AtVariant,
    #[serde(default)]
    pub url: String,
    #[serde(default)]
    pub description: String,
}

/// On-disk glossary layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossaryFile {
    #[serde(default)]
    pub canonicalization: CanonConfig,
    pub rules: Vec<RuleSpec>,
}

#[derive(Debug, Clone)]
pub struct MacroRule {
    pub macro_name: String,
    pub pattern: Vec<PatternAtom>,
    pub template: String,
    pub at_variant: AtVariant,
    pub priority: i32,
    pub definition_link: String,
    pub description: String,
    compiled: Vec<PatNode>,
    parsed: Template,
}

/// A successful match: hole contents and the position after the match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMatch {
    pub captures: Captures,
    pub end: usize,
}

impl MacroRule {
    pub fn from_spec(spec: &RuleSpec) -> Result<Self, GlossaryError> {
        let invalid = |reason: String| GlossaryError::InvalidRule {
            name: spec.name.clone(),
            reason,
        };
        let pattern = expand_atoms(&spec.pattern).map_err(invalid)?;
        let compiled = compile(&pattern).map_err(invalid)?;
        let parsed = Template::parse(&spec.template).map_err(invalid)?;
        if parsed.head != spec.name {
            return Err(invalid(format!(
                "template head `\\{}` differs from the rule name",
                parsed.head
            )));
        }
        if parsed.at != spec.at {
            return Err(invalid(format!(
                "template uses `{}` but the rule declares `{}`",
                parsed.at, spec.at
            )));
        }
        let mut caps = Vec::new();
        capture_names(&compiled, &mut caps);
        let caps: BTreeSet<_> = caps.into_iter().collect();
        let holes: BTreeSet<_> = parsed.holes().cloned().collect();
        if caps != holes || parsed.holes().count() != holes.len() {
            return Err(GlossaryError::TemplateCaptureMismatch(spec.name.clone()));
        }
        Ok(MacroRule {
            macro_name: spec.name.clone(),
            pattern,
            template: spec.template.clone(),
            at_variant: spec.at,
            priority: spec.priority,
            definition_link: spec.url.clone(),
            description: spec.description.clone(),
            compiled,
            parsed,
        })
    }

    /// Tries the rule's surface pattern at `pos` of a canonical node list.
    pub fn match_at(&self, nodes: &[Node], pos: usize) -> Option<RuleMatch> {
        let mut captures = Captures::new();
        let end = match_seq(&self.compiled, nodes, pos, &mut captures)?;
        Some(RuleMatch { captures, end })
    }

    pub(crate) fn compiled(&self) -> &[PatNode] {
        &self.compiled
    }

    pub(crate) fn parsed(&self) -> &Template {
        &self.parsed
    }

    /// Template with placeholder names as contents, e.g. `\Jacobi{a}{b}{n}@{x}`.
    pub fn sample_form(&self) -> String {
        let t = &self.parsed;
        let mut s = format!("\\{}", t.head);
        for p in &t.params {
            s.push_str(&format!("{{{p}}}"));
        }
        s.push_str(t.at.as_str());
        for a in &t.args {
            s.push_str(&format!("{{{a}}}"));
        }
        s
    }

    /// Definition link, falling back to a definition page title.
    pub fn link(&self) -> String {
        if self.definition_link.trim().is_empty() {
            format!("Definition:{}", self.macro_name)
        } else {
            self.definition_link.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Glossary {
    pub rules: Vec<MacroRule>,
    pub canonicalization: CanonConfig,
    canonicalizer: Canonicalizer,
    by_name: HashMap<String, usize>,
}

const SHIPPED: &str = include_str!("../../data/glossary.json");

impl Glossary {
    pub fn from_file(file: &GlossaryFile) -> Result<Self, GlossaryError> {
        let mut rules = Vec::with_capacity(file.rules.len());
        let mut seen = BTreeSet::new();
        for spec in &file.rules {
            if !seen.insert(spec.name.clone()) {
                return Err(GlossaryError::DuplicateMacro(spec.name.clone()));
            }
            rules.push(MacroRule::from_spec(spec)?);
        }
        rules.sort_by(|a, b| {
            b.priority
                .cmp(&a.priority)
                .then(b.pattern.len().cmp(&a.pattern.len()))
                .then(a.macro_name.cmp(&b.macro_name))
        });
        let canonicalizer = Canonicalizer::new(&file.canonicalization)
            .map_err(|reason| GlossaryError::GlossaryParse { line: 0, reason })?;
        let by_name = rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.macro_name.clone(), i))
            .collect();
        Ok(Glossary {
            rules,
            canonicalization: file.canonicalization.clone(),
            canonicalizer,
            by_name,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, GlossaryError> {
        let file: GlossaryFile =
            serde_json::from_str(text).map_err(|e| GlossaryError::GlossaryParse {
                line: e.line(),
                reason: e.to_string(),
            })?;
        Self::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GlossaryError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The glossary bundled with this crate.
    pub fn shipped() -> Self {
        Self::from_json(SHIPPED).expect("bundled glossary is valid")
    }

    pub fn shipped_json() -> &'static str {
        SHIPPED
    }

    pub fn canonicalizer(&self) -> &Canonicalizer {
        &self.canonicalizer
    }

    pub fn rule(&self, name: &str) -> Option<&MacroRule> {
        self.by_name.get(name).map(|&i| &self.rules[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(name: &str, pattern: &str, template: &str, at: &str) -> String {
        format!(
            r#"{{"name":"{name}","priority":0,"pattern":{pattern},"template":"{template}","at":"{at}"}}"#
        )
    }

    fn glossary(rules: &[String]) -> Result<Glossary, GlossaryError> {
        Glossary::from_json(&format!(r#"{{"rules":[{}]}}"#, rules.join(",")))
    }

    const SIN: &str = r#"[{"lit":"\\sin"},{"cap":"z","mode":"token"}]"#;
    const GAMMA: &str = r#"[{"lit":"\\Gamma"},{"open":"("},{"cap":"z"},{"close":")"}]"#;
    const JACOBI: &str = r#"[{"lit":"P_"},{"cap":"n","mode":"group"},{"lit":"^"},{"open":"{"},{"open":"("},{"cap":"a"},{"sep":","},{"cap":"b"},{"close":")"},{"close":"}"},{"open":"("},{"cap":"x"},{"close":")"}]"#;
    const LAGUERRE: &str = r#"[{"lit":"p_"},{"cap":"n","mode":"group"},{"open":"("},{"cap":"x"},{"sep":";"},{"cap":"a"},{"sep":"|"},{"cap":"q"},{"close":")"}]"#;

    #[test]
    fn four_rules() {
        let g = glossary(&[
            rule("sin", SIN, r"\\sin@@{#z}", "@@"),
            rule("EulerGamma", GAMMA, r"\\EulerGamma@{#z}", "@"),
            rule("Jacobi", JACOBI, r"\\Jacobi{#a}{#b}{#n}@{#x}", "@"),
            rule(
                "littleqLaguerre",
                LAGUERRE,
                r"\\littleqLaguerre{#n}@{#x}{#a}{#q}",
                "@",
            ),
        ])
        .unwrap();
        assert_eq!(g.len(), 4);
        // equal priority: longer patterns first
        let order: Vec<_> = g.rules.iter().map(|r| r.macro_name.as_str()).collect();
        assert_eq!(
            order,
            vec!["Jacobi", "littleqLaguerre", "EulerGamma", "sin"]
        );
    }

    #[test]
    fn duplicate_macro() {
        let r = rule("Jacobi", JACOBI, r"\\Jacobi{#a}{#b}{#n}@{#x}", "@");
        assert!(
            matches!(glossary(&[r.clone(), r]), Err(GlossaryError::DuplicateMacro(n)) if n == "Jacobi")
        );
    }

    #[test]
    fn template_capture_mismatch() {
        let pattern =
            r#"[{"lit":"P"},{"cap":"a"},{"sep":","},{"cap":"b"},{"sep":";"},{"cap":"x"}]"#;
        let r = rule("Jacobi", pattern, r"\\Jacobi{#a}@{#x}", "@");
        assert!(
            matches!(glossary(&[r]), Err(GlossaryError::TemplateCaptureMismatch(n)) if n == "Jacobi")
        );
    }

    #[test]
    fn parse_error_has_line() {
        let err = Glossary::from_json("{\n\"rules\": [\n,]}").unwrap_err();
        assert!(
            matches!(err, GlossaryError::GlossaryParse { line: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn at_variant_must_agree() {
        let r = rule("sin", SIN, r"\\sin@{#z}", "@@");
        assert!(matches!(
            glossary(&[r]),
            Err(GlossaryError::InvalidRule { .. })
        ));
    }

    #[test]
    fn shipped_glossary_loads() {
        let g = Glossary::shipped();
        for name in [
            "sin",
            "cos",
            "EulerGamma",
            "Jacobi",
            "littleqLaguerre",
            "Racah",
            "Pochhammer",
            "qPochhammer",
            "qHypergeometric",
        ] {
            let r = g.rule(name).unwrap_or_else(|| panic!("{name} missing"));
            assert!(!r.link().is_empty());
        }
    }

    #[test]
    fn sample_forms() {
        let g = Glossary::shipped();
        assert_eq!(
            g.rule("Jacobi").unwrap().sample_form(),
            r"\Jacobi{a}{b}{n}@{x}"
        );
        assert_eq!(g.rule("sin").unwrap().sample_form(), r"\sin@@{z}");
    }
}
