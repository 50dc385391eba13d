//! Locating math material inside a LaTeX document.

use std::fmt;

use super::token::{detokenize, tokenize, Span, Token, TokenKind, TokenStream};
use super::tree::{build_groups, build_groups_from, Node, TokenTree};
use crate::error::LexError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MathEnv {
    Equation,
    EquationStar,
    Align,
    AlignStar,
    Eqnarray,
    Displaymath,
    InlineDollar,
    BracketDisplay,
}

impl MathEnv {
    fn from_env_name(name: &str) -> Option<Self> {
        Some(match name {
            "equation" => MathEnv::Equation,
            "equation*" => MathEnv::EquationStar,
            "align" => MathEnv::Align,
            "align*" => MathEnv::AlignStar,
            "eqnarray" | "eqnarray*" => MathEnv::Eqnarray,
            "displaymath" => MathEnv::Displaymath,
            _ => return None,
        })
    }

    pub fn is_display(self) -> bool {
        self != MathEnv::InlineDollar
    }

    /// Environments whose rows each become a separate formula.
    pub fn splits_rows(self) -> bool {
        matches!(
            self,
            MathEnv::Align | MathEnv::AlignStar | MathEnv::Eqnarray
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            MathEnv::Equation => "equation",
            MathEnv::EquationStar => "equation*",
            MathEnv::Align => "align",
            MathEnv::AlignStar => "align*",
            MathEnv::Eqnarray => "eqnarray",
            MathEnv::Displaymath => "displaymath",
            MathEnv::InlineDollar => "inline-dollar",
            MathEnv::BracketDisplay => "bracket-display",
        }
    }
}

impl fmt::Display for MathEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One piece of math: an inline formula, a display environment, or one
/// row of an alignment environment. `span` covers the body only, never the
/// delimiters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MathSpan {
    pub environment: MathEnv,
    pub body: TokenTree,
    pub label: Option<String>,
    pub span: Span,
}

impl MathSpan {
    pub fn is_display(&self) -> bool {
        self.environment.is_display()
    }
}

/// A lexed document together with its math spans.
#[derive(Debug, Clone)]
pub struct SourceDocument {
    pub source: String,
    pub tokens: TokenStream,
    pub math: Vec<MathSpan>,
}

impl SourceDocument {
    pub fn parse(source: &str) -> Result<Self, LexError> {
        let tokens = tokenize(source);
        let math = extract_math_tokens(&tokens)?;
        Ok(Self {
            source: source.to_owned(),
            tokens,
            math,
        })
    }

    /// Byte ranges not covered by any math span, in order. Interleaving these
    /// with the math spans reproduces the source.
    pub fn prose_spans(&self) -> Vec<Span> {
        let mut out = Vec::with_capacity(self.math.len() + 1);
        let mut pos = 0;
        for m in &self.math {
            out.push(Span::new(pos, m.span.start));
            pos = m.span.end;
        }
        out.push(Span::new(pos, self.source.len()));
        out
    }

    pub fn text(&self, span: Span) -> &str {
        &self.source[span.start..span.end]
    }
}

/// Finds all math in `doc`, in source order.
pub fn extract_math(doc: &str) -> Result<Vec<MathSpan>, LexError> {
    extract_math_tokens(&tokenize(doc))
}

enum Closer {
    Dollar,
    DoubleDollar,
    Bracket,
    End(String),
}

fn env_name_at(toks: &[Token], i: usize) -> Option<(String, usize)> {
    // `\begin{name}` / `\end{name}`: returns the name and index past `}`
    if !matches!(toks.get(i + 1)?.kind, TokenKind::GroupOpen) {
        return None;
    }
    let mut j = i + 2;
    let mut name = String::new();
    loop {
        let t = toks.get(j)?;
        match &t.kind {
            TokenKind::GroupClose => break,
            TokenKind::Character(c) => name.push(*c),
            _ => return None,
        }
        j += 1;
    }
    Some((name, j + 1))
}

pub(crate) fn extract_math_tokens(ts: &TokenStream) -> Result<Vec<MathSpan>, LexError> {
    // whole-document brace balance
    build_groups(ts)?;

    let toks = ts.tokens();
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        let (env, closer, body_start) = match &t.kind {
            TokenKind::MathShift => {
                if matches!(toks.get(i + 1).map(|t| &t.kind), Some(TokenKind::MathShift)) {
                    (MathEnv::BracketDisplay, Closer::DoubleDollar, i + 2)
                } else {
                    (MathEnv::InlineDollar, Closer::Dollar, i + 1)
                }
            }
            TokenKind::ControlSequence(n) if n == "[" => {
                (MathEnv::BracketDisplay, Closer::Bracket, i + 1)
            }
            TokenKind::ControlSequence(n) if n == "begin" => match env_name_at(toks, i) {
                Some((name, next)) => match MathEnv::from_env_name(&name) {
                    Some(env) => (env, Closer::End(name), next),
                    None => {
                        i = next;
                        continue;
                    }
                },
                None => {
                    i += 1;
                    continue;
                }
            },
            _ => {
                i += 1;
                continue;
            }
        };

        let open_pos = t.span.start;
        let unterminated = || LexError::UnterminatedEnvironment {
            name: env.name().to_owned(),
            position: open_pos,
        };
        let mut j = body_start;
        let body_end;
        let after;
        loop {
            let Some(tok) = toks.get(j) else {
                return Err(unterminated());
            };
            let hit = match (&closer, &tok.kind) {
                (Closer::Dollar, TokenKind::MathShift) => Some(j + 1),
                (Closer::DoubleDollar, TokenKind::MathShift)
                    if matches!(toks.get(j + 1).map(|t| &t.kind), Some(TokenKind::MathShift)) =>
                {
                    Some(j + 2)
                }
                (Closer::DoubleDollar, TokenKind::MathShift) => return Err(unterminated()),
                (Closer::Bracket, TokenKind::ControlSequence(n)) if n == "]" => Some(j + 1),
                (Closer::End(name), TokenKind::ControlSequence(n)) if n == "end" => {
                    match env_name_at(toks, j) {
                        Some((found, next)) if &found == name => Some(next),
                        _ => None,
                    }
                }
                _ => None,
            };
            if let Some(next) = hit {
                body_end = j;
                after = next;
                break;
            }
            j += 1;
        }

        let body = &toks[body_start..body_end];
        let rows: Vec<&[Token]> = if env.splits_rows() {
            split_rows(body)
        } else {
            vec![body]
        };
        let body_span_start = toks.get(body_start).map_or(0, |t| t.span.start);
        for row in rows {
            if env.splits_rows()
                && row
                    .iter()
                    .all(|t| matches!(t.kind, TokenKind::Whitespace(_) | TokenKind::Comment(_)))
            {
                continue;
            }
            let span = match (row.first(), row.last()) {
                (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
                _ => Span::new(body_span_start, body_span_start),
            };
            let tree = build_groups_from(row.iter().cloned())?;
            let label = find_label(&tree.nodes);
            out.push(MathSpan {
                environment: env,
                body: tree,
                label,
                span,
            });
        }
        i = after;
    }
    Ok(out)
}

/// Splits alignment bodies at top-level `\\`.
fn split_rows(body: &[Token]) -> Vec<&[Token]> {
    let mut rows = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (k, t) in body.iter().enumerate() {
        match &t.kind {
            TokenKind::GroupOpen => depth += 1,
            TokenKind::GroupClose => depth = depth.saturating_sub(1),
            TokenKind::ControlSequence(n) if n == "\\" && depth == 0 => {
                rows.push(&body[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    rows.push(&body[start..]);
    rows
}

fn find_label(nodes: &[Node]) -> Option<String> {
    nodes.windows(2).find_map(|w| match (&w[0], &w[1]) {
        (Node::Leaf(t), Node::Group { children, .. }) if t.kind.is_cs("label") => Some(
            detokenize(super::tree::flatten_nodes(children))
                .trim()
                .to_owned(),
        ),
        _ => None,
    })
}
