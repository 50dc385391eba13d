//! Semantic macro templates such as `\Jacobi{#a}{#b}{#n}@{#x}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::pattern::Captures;
use crate::lexer::{tokenize, Node, Span, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtVariant {
    #[serde(rename = "@")]
    Single,
    #[serde(rename = "@@")]
    Double,
}

impl AtVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            AtVariant::Single => "@",
            AtVariant::Double => "@@",
        }
    }

    fn count(self) -> usize {
        self.as_str().len()
    }
}

impl fmt::Display for AtVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parsed template: `\head`, parameter holes, the `@` marker, argument holes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Template {
    pub head: String,
    pub params: Vec<String>,
    pub at: AtVariant,
    pub args: Vec<String>,
}

impl Template {
    pub fn parse(src: &str) -> Result<Self, String> {
        let toks: Vec<TokenKind> = tokenize(src)
            .into_iter()
            .map(|t| t.kind)
            .filter(|k| !matches!(k, TokenKind::Whitespace(_)))
            .collect();
        let mut it = toks.iter().peekable();
        let head = match it.next() {
            Some(TokenKind::ControlSequence(n)) if !n.is_empty() => n.clone(),
            _ => return Err("template must start with a control sequence".into()),
        };

        let read_holes = |it: &mut std::iter::Peekable<std::slice::Iter<'_, TokenKind>>| -> Result<Vec<String>, String> {
            let mut holes = Vec::new();
            while matches!(it.peek(), Some(TokenKind::GroupOpen)) {
                it.next();
                if !matches!(it.next(), Some(TokenKind::Character('#'))) {
                    return Err("each template argument must be a single `{#name}` placeholder".into());
                }
                let mut name = String::new();
                loop {
                    match it.next() {
                        Some(TokenKind::Character(c)) if c.is_ascii_alphanumeric() => name.push(*c),
                        Some(TokenKind::GroupClose) if !name.is_empty() => break,
                        _ => return Err("each template argument must be a single `{#name}` placeholder".into()),
                    }
                }
                holes.push(name);
            }
            Ok(holes)
        };

        let params = read_holes(&mut it)?;
        let mut ats = 0;
        while matches!(it.peek(), Some(TokenKind::Character('@'))) {
            it.next();
            ats += 1;
        }
        let at = match ats {
            1 => AtVariant::Single,
            2 => AtVariant::Double,
            0 => return Err("template has no @ marker".into()),
            _ => return Err("template has more than @@".into()),
        };
        let args = read_holes(&mut it)?;
        if it.next().is_some() {
            return Err("unexpected material after template arguments".into());
        }
        Ok(Template {
            head,
            params,
            at,
            args,
        })
    }

    pub fn holes(&self) -> impl Iterator<Item = &String> {
        self.params.iter().chain(&self.args)
    }

    /// Builds the semantic call from captured contents. Every produced token
    /// carries `span` or its original span, and is marked inert.
    pub fn instantiate(&self, caps: &Captures, span: Span) -> Vec<Node> {
        let mk = |kind| {
            let mut t = Token::new(kind, span);
            t.inert = true;
            Node::Leaf(t)
        };
        let group = |name: &String| {
            let mut g = Node::group(caps.get(name).cloned().unwrap_or_default(), span);
            g.set_inert();
            g
        };
        let mut out = vec![mk(TokenKind::ControlSequence(self.head.clone()))];
        out.extend(self.params.iter().map(group));
        out.extend((0..self.at.count()).map(|_| mk(TokenKind::Character('@'))));
        out.extend(self.args.iter().map(group));
        out
    }

    /// Length of a call to this macro starting at `pos`, if one is there.
    pub fn call_len(&self, nodes: &[Node], pos: usize) -> Option<usize> {
        if !nodes.get(pos)?.is_cs(&self.head) {
            return None;
        }
        // like TeX, a call consumes exactly its arity; later groups are not ours
        call_shape(nodes, pos)
            .filter(|s| {
                s.params == self.params.len()
                    && s.at == self.at.count()
                    && s.args >= self.args.len()
            })
            .map(|s| 1 + s.params + s.at + self.args.len())
    }

    /// Splits a call at `pos` into hole contents.
    pub fn read_call(&self, nodes: &[Node], pos: usize) -> Option<(Captures, usize)> {
        let len = self.call_len(nodes, pos)?;
        let mut caps = Captures::new();
        let mut groups = nodes[pos + 1..pos + len].iter().filter_map(Node::children);
        for name in self.holes() {
            caps.insert(name.clone(), groups.next()?.to_vec());
        }
        Some((caps, len))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct CallShape {
    pub params: usize,
    pub at: usize,
    pub args: usize,
    pub len: usize,
}

/// Recognizes `\name{..}..@{..}..` at `pos` regardless of which macro it is.
/// The number of trailing argument groups is taken greedily.
pub(crate) fn call_shape(nodes: &[Node], pos: usize) -> Option<CallShape> {
    if !nodes.get(pos)?.kind()?.is_control_word() {
        return None;
    }
    let mut i = pos + 1;
    let count_groups = |i: &mut usize| {
        let s = *i;
        while matches!(nodes.get(*i), Some(Node::Group { .. })) {
            *i += 1;
        }
        *i - s
    };
    let params = count_groups(&mut i);
    let s = i;
    while nodes.get(i).is_some_and(|n| n.is_char('@')) {
        i += 1;
    }
    let at = i - s;
    if at == 0 {
        return None;
    }
    let args = count_groups(&mut i);
    Some(CallShape {
        params,
        at,
        args,
        len: i - pos,
    })
}
