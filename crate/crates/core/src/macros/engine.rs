//! Leftmost rule-based replacement and its inverse.

use super::glossary::Glossary;
use super::pattern::{CaptureMode, PatNode};
use super::stats::ReplacementStats;
use super::template::call_shape;
use crate::canon::CanonicalTree;
use crate::error::StripError;
use crate::lexer::{Node, Span, Token, TokenKind, TokenTree};

impl Glossary {
    /// Replaces every presentation pattern in `t` by its semantic macro.
    ///
    /// The scan is leftmost; at each position the first rule in glossary
    /// order that matches fires. Captured arguments are rewritten
    /// recursively before substitution, and everything produced is marked
    /// inert. Existing semantic calls are left alone (their arguments are
    /// still scanned).
    pub fn replace_all(&self, t: &CanonicalTree) -> (CanonicalTree, ReplacementStats) {
        let mut stats = ReplacementStats {
            formulae: 1,
            ..Default::default()
        };
        let nodes = self.replace_nodes(&t.tree.nodes, &mut stats);
        stats.formulae_touched = u64::from(stats.total > 0);
        (CanonicalTree::new(TokenTree::new(nodes)), stats)
    }

    /// Same as [`Glossary::replace_all`] on a bare node list, accumulating
    /// firings into `stats` without touching its formula counters.
    pub fn replace_nodes(&self, nodes: &[Node], stats: &mut ReplacementStats) -> Vec<Node> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut i = 0;
        'scan: while i < nodes.len() {
            if let Some(len) = self.semantic_call_len(nodes, i) {
                for n in &nodes[i..i + len] {
                    out.push(self.replace_inside(n, stats));
                }
                i += len;
                continue;
            }
            if !nodes[i].any_inert() {
                for rule in &self.rules {
                    if let Some(m) = rule.match_at(nodes, i) {
                        let captures = m
                            .captures
                            .into_iter()
                            .map(|(k, v)| (k, self.replace_nodes(&v, stats)))
                            .collect();
                        let span = nodes[i..m.end]
                            .iter()
                            .flat_map(|n| crate::lexer::flatten_nodes(std::slice::from_ref(n)))
                            .map(|t| t.span)
                            .reduce(Span::cover)
                            .unwrap_or_default();
                        out.extend(rule.parsed().instantiate(&captures, span));
                        stats.record(&rule.macro_name);
                        i = m.end;
                        continue 'scan;
                    }
                }
            }
            out.push(self.replace_inside(&nodes[i], stats));
            i += 1;
        }
        out
    }

    fn replace_inside(&self, n: &Node, stats: &mut ReplacementStats) -> Node {
        match n {
            Node::Group {
                open,
                children,
                close,
            } => Node::Group {
                open: open.clone(),
                children: self.replace_nodes(children, stats),
                close: close.clone(),
            },
            leaf => leaf.clone(),
        }
    }

    /// Length of a well-formed call to a glossary macro at `pos`.
    pub fn semantic_call_len(&self, nodes: &[Node], pos: usize) -> Option<usize> {
        let name = nodes.get(pos)?.kind()?.cs_name()?;
        self.rule(name)?.parsed().call_len(nodes, pos)
    }

    /// Names of glossary macros called anywhere in `nodes`, in order of
    /// appearance (with repeats).
    pub fn semantic_calls(&self, nodes: &[Node]) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_calls(nodes, &mut out);
        out
    }

    fn collect_calls(&self, nodes: &[Node], out: &mut Vec<String>) {
        for (i, n) in nodes.iter().enumerate() {
            if self.semantic_call_len(nodes, i).is_some() {
                if let Some(name) = n.kind().and_then(TokenKind::cs_name) {
                    out.push(name.to_owned());
                }
            }
            if let Some(children) = n.children() {
                self.collect_calls(children, out);
            }
        }
    }

    /// Expands semantic macros back to their canonical presentation.
    pub fn strip_semantics(&self, t: &TokenTree) -> Result<TokenTree, StripError> {
        Ok(TokenTree::new(self.strip_nodes(&t.nodes)?))
    }

    fn strip_nodes(&self, nodes: &[Node]) -> Result<Vec<Node>, StripError> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut i = 0;
        while i < nodes.len() {
            if call_shape(nodes, i).is_some() {
                let name = nodes[i]
                    .kind()
                    .and_then(TokenKind::cs_name)
                    .unwrap_or_default();
                let rule = self
                    .rule(name)
                    .ok_or_else(|| StripError::UnknownSemanticMacro(name.to_owned()))?;
                if let Some((caps, len)) = rule.parsed().read_call(nodes, i) {
                    let mut stripped = std::collections::BTreeMap::new();
                    for (k, v) in caps {
                        stripped.insert(k, self.strip_nodes(&v)?);
                    }
                    render_pattern(rule.compiled(), &stripped, &mut out);
                    i += len;
                    continue;
                }
                // known macro, wrong arity
                return Err(StripError::UnknownSemanticMacro(name.to_owned()));
            }
            out.push(match &nodes[i] {
                Node::Group {
                    open,
                    children,
                    close,
                } => Node::Group {
                    open: open.clone(),
                    children: self.strip_nodes(children)?,
                    close: close.clone(),
                },
                leaf => leaf.clone(),
            });
            i += 1;
        }
        Ok(out)
    }
}

fn fresh(kind: TokenKind) -> Node {
    Node::Leaf(Token::new(kind, Span::default()))
}

fn render_pattern(pat: &[PatNode], caps: &super::pattern::Captures, out: &mut Vec<Node>) {
    for p in pat {
        match p {
            PatNode::Lit(k) => out.push(fresh(k.clone())),
            PatNode::Char(c) => out.push(fresh(TokenKind::Character(*c))),
            PatNode::Brace(inner) => {
                let mut children = Vec::new();
                render_pattern(inner, caps, &mut children);
                out.push(Node::group(children, Span::default()));
            }
            PatNode::Cap(name, mode) => {
                let content = caps.get(name).cloned().unwrap_or_default();
                match mode {
                    CaptureMode::Balanced => out.extend(content),
                    // canonical script arguments are always braced
                    CaptureMode::Group => out.push(Node::group(content, Span::default())),
                    CaptureMode::Token => {
                        if content.len() == 1 && content[0].leaf().is_some() {
                            out.extend(content);
                        } else {
                            out.push(Node::group(content, Span::default()));
                        }
                    }
                }
            }
        }
    }
}
