//! Canonical form of math token trees.
//!
//! Presentation-only variation is collapsed before matching: spacing
//! commands, `\left`/`\big`-style size prefixes, delimiter synonyms and bar
//! synonyms. Structural commands such as `\frac` are kept.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::CanonError;
use crate::lexer::{flatten_nodes, tokenize, Node, Span, Token, TokenKind, TokenTree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelimiterClass {
    pub canonical: String,
    pub variants: Vec<String>,
}

/// The `canonicalization` section of a glossary file.
///
/// Spacing entries ending in `{}` swallow one following brace group
/// (`\hspace{}`), with an optional `*` in between.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonConfig {
    pub spacing_tokens: Vec<String>,
    pub delimiter_classes: Vec<DelimiterClass>,
    pub bar_synonyms: Vec<String>,
    #[serde(default = "default_size_prefixes")]
    pub size_prefixes: Vec<String>,
}

fn default_size_prefixes() -> Vec<String> {
    [
        "left", "right", "middle", "big", "Big", "bigg", "Bigg", "bigl", "Bigl", "biggl", "Biggl",
        "bigr", "Bigr", "biggr", "Biggr", "bigm", "Bigm", "biggm", "Biggm",
    ]
    .iter()
    .map(|s| format!("\\{s}"))
    .collect()
}

impl Default for CanonConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let class = |c: &str, v: &[&str]| DelimiterClass {
            canonical: c.into(),
            variants: s(v),
        };
        CanonConfig {
            spacing_tokens: s(&[
                "\\,",
                "\\!",
                "\\;",
                "\\:",
                "\\>",
                "\\ ",
                "~",
                "\\quad",
                "\\qquad",
                "\\thinspace",
                "\\medspace",
                "\\thickspace",
                "\\negthinspace",
                "\\negmedspace",
                "\\negthickspace",
                "\\enspace",
                "\\hspace{}",
            ]),
            delimiter_classes: vec![
                class("(", &["(", "\\lparen"]),
                class(")", &[")", "\\rparen"]),
                class("[", &["[", "\\lbrack"]),
                class("]", &["]", "\\rbrack"]),
                class("\\{", &["\\{", "\\lbrace"]),
                class("\\}", &["\\}", "\\rbrace"]),
                class("|", &["|", "\\lvert", "\\rvert"]),
                class("\\|", &["\\|", "\\Vert", "\\lVert", "\\rVert"]),
            ],
            bar_synonyms: s(&["\\mid", "\\vert"]),
            size_prefixes: default_size_prefixes(),
        }
    }
}

/// Canonical tree plus the original span of every flattened token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalTree {
    pub tree: TokenTree,
    pub provenance: Vec<Span>,
}

impl CanonicalTree {
    pub fn new(tree: TokenTree) -> Self {
        let provenance = tree.tokens().iter().map(|t| t.span).collect();
        Self { tree, provenance }
    }

    pub fn to_latex(&self) -> String {
        self.tree.to_latex()
    }
}

fn single_token(spec: &str) -> Result<TokenKind, String> {
    let ts = tokenize(spec);
    match ts.tokens() {
        [t] => Ok(t.kind.clone()),
        _ => Err(format!("`{spec}` is not a single token")),
    }
}

/// Compiled canonicalization rules.
#[derive(Debug, Clone)]
pub struct Canonicalizer {
    spacing: HashSet<TokenKind>,
    spacing_with_arg: HashSet<TokenKind>,
    delimiters: HashMap<TokenKind, TokenKind>,
    size_prefixes: HashSet<TokenKind>,
}

impl Default for Canonicalizer {
    fn default() -> Self {
        Canonicalizer::new(&CanonConfig::default()).expect("builtin canonicalization config")
    }
}

impl Canonicalizer {
    pub fn new(cfg: &CanonConfig) -> Result<Self, String> {
        let mut spacing = HashSet::new();
        let mut spacing_with_arg = HashSet::new();
        for s in &cfg.spacing_tokens {
            match s.strip_suffix("{}") {
                Some(head) => spacing_with_arg.insert(single_token(head)?),
                None => spacing.insert(single_token(s)?),
            };
        }
        let mut delimiters = HashMap::new();
        for class in &cfg.delimiter_classes {
            let canonical = single_token(&class.canonical)?;
            for v in &class.variants {
                delimiters.insert(single_token(v)?, canonical.clone());
            }
        }
        for b in &cfg.bar_synonyms {
            delimiters.insert(single_token(b)?, TokenKind::Character('|'));
        }
        let size_prefixes = cfg
            .size_prefixes
            .iter()
            .map(|s| single_token(s))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            spacing,
            spacing_with_arg,
            delimiters,
            size_prefixes,
        })
    }

    /// Removes spacing commands and literal whitespace.
    pub fn strip_spacing(&self, t: &TokenTree) -> TokenTree {
        TokenTree::new(self.strip_nodes(&t.nodes))
    }

    fn strip_nodes(&self, nodes: &[Node]) -> Vec<Node> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut i = 0;
        while i < nodes.len() {
            match &nodes[i] {
                Node::Leaf(t)
                    if matches!(t.kind, TokenKind::Whitespace(_))
                        || self.spacing.contains(&t.kind) =>
                {
                    i += 1;
                }
                Node::Leaf(t) if self.spacing_with_arg.contains(&t.kind) => {
                    i += 1;
                    let skip_ws = |i: &mut usize| {
                        while nodes
                            .get(*i)
                            .and_then(Node::kind)
                            .is_some_and(|k| matches!(k, TokenKind::Whitespace(_)))
                        {
                            *i += 1;
                        }
                    };
                    skip_ws(&mut i);
                    if nodes.get(i).is_some_and(|n| n.is_char('*')) {
                        i += 1;
                        skip_ws(&mut i);
                    }
                    if matches!(nodes.get(i), Some(Node::Group { .. })) {
                        i += 1;
                    }
                }
                Node::Group {
                    open,
                    children,
                    close,
                } => {
                    out.push(Node::Group {
                        open: open.clone(),
                        children: self.strip_nodes(children),
                        close: close.clone(),
                    });
                    i += 1;
                }
                leaf => {
                    out.push(leaf.clone());
                    i += 1;
                }
            }
        }
        out
    }

    /// Collapses size prefixes and delimiter synonyms onto canonical tokens.
    pub fn normalize_delimiters(&self, t: &TokenTree) -> Result<TokenTree, CanonError> {
        Ok(TokenTree::new(self.normalize_nodes(&t.nodes)?))
    }

    fn normalize_nodes(&self, nodes: &[Node]) -> Result<Vec<Node>, CanonError> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut open_lefts: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            match &nodes[i] {
                Node::Group {
                    open,
                    children,
                    close,
                } => {
                    out.push(Node::Group {
                        open: open.clone(),
                        children: self.normalize_nodes(children)?,
                        close: close.clone(),
                    });
                    i += 1;
                }
                Node::Leaf(prefix) if self.size_prefixes.contains(&prefix.kind) => {
                    let is_left = prefix.kind.is_cs("left");
                    let is_right = prefix.kind.is_cs("right");
                    if is_left {
                        open_lefts.push(prefix.span.start);
                    } else if is_right && open_lefts.pop().is_none() {
                        return Err(CanonError::MismatchedLeftRight {
                            position: prefix.span.start,
                        });
                    }
                    let mut j = i + 1;
                    while nodes
                        .get(j)
                        .and_then(Node::kind)
                        .is_some_and(|k| matches!(k, TokenKind::Whitespace(_)))
                    {
                        j += 1;
                    }
                    match nodes.get(j) {
                        Some(Node::Leaf(delim)) => {
                            if !delim.kind.is_char('.') {
                                out.push(Node::Leaf(
                                    self.map_delimiter(delim, prefix.span.cover(delim.span)),
                                ));
                            }
                            i = j + 1;
                        }
                        _ if is_left || is_right => {
                            return Err(CanonError::MismatchedLeftRight {
                                position: prefix.span.start,
                            });
                        }
                        _ => {
                            out.push(Node::Leaf(prefix.clone()));
                            i += 1;
                        }
                    }
                }
                Node::Leaf(t) => {
                    let mapped = self.map_delimiter(t, t.span);
                    let was_word = t.kind.is_control_word() && !mapped.kind.is_control_word();
                    out.push(Node::Leaf(mapped));
                    i += 1;
                    // the space after a control word only terminated its name
                    if was_word
                        && nodes
                            .get(i)
                            .and_then(Node::kind)
                            .is_some_and(|k| matches!(k, TokenKind::Whitespace(_)))
                    {
                        i += 1;
                    }
                }
            }
        }
        if let Some(&position) = open_lefts.first() {
            return Err(CanonError::MismatchedLeftRight { position });
        }
        Ok(out)
    }

    fn map_delimiter(&self, t: &Token, span: Span) -> Token {
        let kind = self
            .delimiters
            .get(&t.kind)
            .cloned()
            .unwrap_or_else(|| t.kind.clone());
        Token {
            kind,
            span,
            inert: t.inert,
        }
    }

    /// Spacing removal, delimiter normalization, removal of alignment tabs
    /// and comments, then bracing of script arguments.
    pub fn canonicalize(&self, t: &TokenTree) -> Result<CanonicalTree, CanonError> {
        let stripped = self.strip_spacing(t);
        let normalized = self.normalize_delimiters(&stripped)?;
        let cleaned = drop_tabs_and_comments(&normalized.nodes);
        Ok(CanonicalTree::new(TokenTree::new(brace_scripts(&cleaned))))
    }
}

/// Commands that take brace arguments, so a script made of one of them
/// extends past the command itself (`x^\frac{1}{2}`).
const TAKES_ARGUMENTS: &[&str] = &[
    "frac",
    "dfrac",
    "tfrac",
    "cfrac",
    "binom",
    "dbinom",
    "tbinom",
    "genfrac",
    "sqrt",
    "mathrm",
    "mathbf",
    "mathit",
    "mathcal",
    "mathsf",
    "mathbb",
    "mathfrak",
    "text",
    "textrm",
    "operatorname",
    "hat",
    "bar",
    "tilde",
    "vec",
    "dot",
    "ddot",
    "overline",
    "underline",
    "widehat",
    "widetilde",
    "boldsymbol",
];

/// `x_n` becomes `x_{n}`.
fn brace_scripts(nodes: &[Node]) -> Vec<Node> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut i = 0;
    while i < nodes.len() {
        let n = &nodes[i];
        if let Node::Group {
            open,
            children,
            close,
        } = n
        {
            out.push(Node::Group {
                open: open.clone(),
                children: brace_scripts(children),
                close: close.clone(),
            });
            i += 1;
            continue;
        }
        out.push(n.clone());
        i += 1;
        if !matches!(
            n.kind(),
            Some(TokenKind::Subscript | TokenKind::Superscript)
        ) {
            continue;
        }
        let Some(Node::Leaf(op)) = nodes.get(i) else {
            continue;
        };
        let wrap = match &op.kind {
            TokenKind::Character(_) => true,
            TokenKind::ControlSequence(name) => !TAKES_ARGUMENTS.contains(&name.as_str()),
            _ => false,
        };
        if wrap {
            let at = |p| Token {
                kind: TokenKind::GroupOpen,
                span: Span { start: p, end: p },
                inert: op.inert,
            };
            let close = Token {
                kind: TokenKind::GroupClose,
                ..at(op.span.end)
            };
            out.push(Node::Group {
                open: at(op.span.start),
                children: vec![Node::Leaf(op.clone())],
                close,
            });
            i += 1;
        }
    }
    out
}

fn drop_tabs_and_comments(nodes: &[Node]) -> Vec<Node> {
    nodes
        .iter()
        .filter_map(|n| match n {
            Node::Leaf(t) if matches!(t.kind, TokenKind::AlignmentTab | TokenKind::Comment(_)) => {
                None
            }
            Node::Group {
                open,
                children,
                close,
            } => Some(Node::Group {
                open: open.clone(),
                children: drop_tabs_and_comments(children),
                close: close.clone(),
            }),
            other => Some(other.clone()),
        })
        .collect()
}

/// Flattened canonical tokens as text, handy for comparisons.
pub fn canonical_text(nodes: &[Node]) -> String {
    crate::lexer::detokenize(flatten_nodes(nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::{build_groups, tokenize};

    fn tree(s: &str) -> TokenTree {
        build_groups(&tokenize(s)).unwrap()
    }

    fn canon(s: &str) -> String {
        Canonicalizer::default()
            .canonicalize(&tree(s))
            .unwrap()
            .to_latex()
    }

    #[test]
    fn strip_thin_space() {
        let c = Canonicalizer::default();
        assert_eq!(c.strip_spacing(&tree(r"\sin\, z")).to_latex(), r"\sin z");
        assert_eq!(
            c.strip_spacing(&tree(r"\sin\, z")).kinds(),
            vec![TokenKind::cs("sin"), TokenKind::Character('z')]
        );
    }

    #[test]
    fn strip_hspace_with_argument() {
        let c = Canonicalizer::default();
        assert_eq!(c.strip_spacing(&tree(r"\hspace{1em}x")).to_latex(), "x");
        assert_eq!(c.strip_spacing(&tree(r"\hspace*{2pt}x")).to_latex(), "x");
    }

    #[test]
    fn strip_identity_on_plain_input() {
        assert_eq!(
            Canonicalizer::default().strip_spacing(&tree("xyz")),
            tree("xyz")
        );
    }

    #[test]
    fn left_right_parens() {
        let c = Canonicalizer::default();
        assert_eq!(
            c.normalize_delimiters(&tree(r"\Gamma\left(z\right)"))
                .unwrap()
                .to_latex(),
            r"\Gamma(z)"
        );
    }

    #[test]
    fn mid_becomes_bar() {
        let c = Canonicalizer::default();
        assert_eq!(
            c.normalize_delimiters(&tree(r"p_n(x;a\mid q)"))
                .unwrap()
                .to_latex(),
            "p_n(x;a|q)"
        );
    }

    #[test]
    fn canonical_parens_unchanged() {
        let c = Canonicalizer::default();
        assert_eq!(c.normalize_delimiters(&tree("(x)")).unwrap(), tree("(x)"));
    }

    #[test]
    fn null_delimiters_dropped() {
        assert_eq!(
            canon(r"\left.\frac{d}{dx}f\right|_{x=0}"),
            r"\frac{d}{dx}f|_{x=0}"
        );
    }

    #[test]
    fn size_variants_collapse() {
        for v in [
            r"\bigl(x\bigr)",
            r"\Bigl(x\Bigr)",
            r"\big(x\big)",
            r"\biggl(x\biggr)",
            r"\Biggl(x\Biggr)",
            r"\left\lparen x\right\rparen",
        ] {
            assert_eq!(canon(v), "(x)", "{v}");
        }
        assert_eq!(canon(r"\left\lbrace x\right\rbrace"), r"\{x\}");
    }

    #[test]
    fn mismatched_left_right() {
        let c = Canonicalizer::default();
        assert_eq!(
            c.canonicalize(&tree(r"a\left(b")),
            Err(CanonError::MismatchedLeftRight { position: 1 })
        );
        assert!(c.canonicalize(&tree(r"b\right)")).is_err());
        assert!(c.canonicalize(&tree(r"{\left(}\right)")).is_err());
    }

    #[test]
    fn composed_gamma() {
        assert_eq!(canon(r"\Gamma\left(\, z \right)"), r"\Gamma(z)");
    }

    #[test]
    fn jacobi_spacing() {
        assert_eq!(
            canon(r"P_n^{(\alpha ,\beta )} (x)"),
            r"P_{n}^{(\alpha,\beta)}(x)"
        );
    }

    #[test]
    fn script_arguments_braced() {
        assert_eq!(canon(r"x_n+y^\alpha+z_{k}"), r"x_{n}+y^{\alpha}+z_{k}");
        assert_eq!(canon(r"x^\frac{1}{2}"), r"x^\frac{1}{2}");
        assert_eq!(canon(r"x_\nu{}_2"), r"x_{\nu}{}_{2}");
        assert_eq!(canon(r"\sum_{k=0}^\infty"), r"\sum_{k=0}^{\infty}");
        assert_eq!(canon("x_ n"), "x_{n}");
    }

    #[test]
    fn tabs_and_comments_removed() {
        assert_eq!(canon("a &= b % c\n"), "a=b");
    }

    #[test]
    fn provenance_tracks_merged_tokens() {
        let src = r"\left( z\right)";
        let ct = Canonicalizer::default().canonicalize(&tree(src)).unwrap();
        assert_eq!(ct.provenance.len(), 3);
        assert_eq!(
            &src[ct.provenance[0].start..ct.provenance[0].end],
            r"\left("
        );
        assert_eq!(
            &src[ct.provenance[2].start..ct.provenance[2].end],
            r"\right)"
        );
    }

    #[test]
    fn structural_commands_kept() {
        assert_eq!(canon(r"\frac{1}{\sqrt{x}}"), r"\frac{1}{\sqrt{x}}");
    }
}
