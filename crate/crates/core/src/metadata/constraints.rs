use super::{Annotation, AnnotationKind, Extractor, Formula, Origin};
use crate::canon::CanonicalTree;
use crate::lexer::{flatten_nodes, nodes_to_latex, Node, Span, TokenKind, TokenTree};

const RELATION_WORDS: &[&str] = &[
    "le", "leq", "ge", "geq", "ne", "neq", "in", "lt", "gt", "leqslant", "geqslant", "notin",
];

pub fn is_relational(n: &Node) -> bool {
    match n.kind() {
        Some(TokenKind::Character(c)) => matches!(c, '<' | '>' | '=' | '≤' | '≥' | '≠'),
        Some(TokenKind::ControlSequence(name)) => RELATION_WORDS.contains(&name.as_str()),
        _ => false,
    }
}

/// Parenthesis depth before each node, counting `(`/`[` against `)`/`]`.
pub(crate) fn paren_depths(nodes: &[Node]) -> Vec<usize> {
    let mut depth = 0usize;
    nodes
        .iter()
        .map(|n| {
            let d = depth;
            if n.is_char('(') || n.is_char('[') {
                depth += 1;
            } else if n.is_char(')') || n.is_char(']') {
                depth = depth.saturating_sub(1);
            }
            d
        })
        .collect()
}

/// Index of the comma that separates a trailing relational clause, if any:
/// the first top-level comma whose following clause (up to the next
/// top-level comma) holds a top-level relation.
pub fn split_constraint(nodes: &[Node]) -> Option<usize> {
    let depths = paren_depths(nodes);
    let commas: Vec<usize> = (0..nodes.len())
        .filter(|&i| depths[i] == 0 && nodes[i].is_char(','))
        .collect();
    commas.iter().enumerate().find_map(|(k, &c)| {
        let end = commas.get(k + 1).copied().unwrap_or(nodes.len());
        (c + 1..end)
            .any(|i| depths[i] == 0 && is_relational(&nodes[i]))
            .then_some(c)
    })
}

pub(crate) fn nodes_span(nodes: &[Node]) -> Span {
    flatten_nodes(nodes)
        .iter()
        .map(|t| t.span)
        .reduce(Span::cover)
        .unwrap_or_default()
}

impl Extractor<'_> {
    /// Splits a trailing relational clause off the semantic core. Prose
    /// constraints ("where ...") are collected while harvesting.
    pub fn detect_constraints(&self, f: &Formula) -> (CanonicalTree, Vec<Annotation>) {
        let nodes = &f.semantic.tree.nodes;
        match split_constraint(nodes) {
            Some(c) => {
                let clause = &nodes[c + 1..];
                let body = nodes_to_latex(clause);
                let core = CanonicalTree::new(TokenTree::new(nodes[..c].to_vec()));
                (
                    core,
                    vec![Annotation::new(
                        AnnotationKind::Constraint,
                        body,
                        Origin::Span(nodes_span(clause)),
                    )],
                )
            }
            None => (f.semantic.clone(), Vec::new()),
        }
    }
}
