//! Balanced `{ ... }` group trees over a token stream.

use super::token::{detokenize, Token, TokenKind, TokenStream};
use crate::error::LexError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(Token),
    Group {
        open: Token,
        children: Vec<Node>,
        close: Token,
    },
}

impl Node {
    pub fn leaf(&self) -> Option<&Token> {
        match self {
            Node::Leaf(t) => Some(t),
            Node::Group { .. } => None,
        }
    }

    pub fn kind(&self) -> Option<&TokenKind> {
        self.leaf().map(|t| &t.kind)
    }

    pub fn is_char(&self, c: char) -> bool {
        self.kind().is_some_and(|k| k.is_char(c))
    }

    pub fn is_cs(&self, name: &str) -> bool {
        self.kind().is_some_and(|k| k.is_cs(name))
    }

    pub fn children(&self) -> Option<&[Node]> {
        match self {
            Node::Group { children, .. } => Some(children),
            Node::Leaf(_) => None,
        }
    }

    /// First byte offset this node came from.
    pub fn start(&self) -> usize {
        match self {
            Node::Leaf(t) => t.span.start,
            Node::Group { open, .. } => open.span.start,
        }
    }

    pub fn is_inert(&self) -> bool {
        match self {
            Node::Leaf(t) => t.inert,
            Node::Group {
                open,
                close,
                children,
            } => open.inert && close.inert && children.iter().all(Node::is_inert),
        }
    }

    pub fn any_inert(&self) -> bool {
        match self {
            Node::Leaf(t) => t.inert,
            Node::Group {
                open,
                close,
                children,
            } => open.inert || close.inert || children.iter().any(Node::any_inert),
        }
    }

    pub fn set_inert(&mut self) {
        match self {
            Node::Leaf(t) => t.inert = true,
            Node::Group {
                open,
                children,
                close,
            } => {
                open.inert = true;
                close.inert = true;
                children.iter_mut().for_each(Node::set_inert);
            }
        }
    }

    /// Wraps `children` in a fresh brace pair.
    pub fn group(children: Vec<Node>, span: super::Span) -> Node {
        Node::Group {
            open: Token::new(TokenKind::GroupOpen, span),
            children,
            close: Token::new(TokenKind::GroupClose, span),
        }
    }

    fn flatten_into<'a>(&'a self, out: &mut Vec<&'a Token>) {
        match self {
            Node::Leaf(t) => out.push(t),
            Node::Group {
                open,
                children,
                close,
            } => {
                out.push(open);
                for c in children {
                    c.flatten_into(out);
                }
                out.push(close);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenTree {
    pub nodes: Vec<Node>,
}

impl TokenTree {
    pub fn new(nodes: Vec<Node>) -> Self {
        Self { nodes }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Depth-first leaf order, braces included.
    pub fn tokens(&self) -> Vec<&Token> {
        flatten_nodes(&self.nodes)
    }

    pub fn flatten(&self) -> TokenStream {
        TokenStream(self.tokens().into_iter().cloned().collect())
    }

    pub fn kinds(&self) -> Vec<TokenKind> {
        self.tokens().into_iter().map(|t| t.kind.clone()).collect()
    }

    pub fn to_latex(&self) -> String {
        detokenize(self.tokens())
    }
}

pub fn flatten_nodes(nodes: &[Node]) -> Vec<&Token> {
    let mut out = Vec::new();
    for n in nodes {
        n.flatten_into(&mut out);
    }
    out
}

pub fn nodes_to_latex(nodes: &[Node]) -> String {
    detokenize(flatten_nodes(nodes))
}

/// Groups a token stream into balanced brace trees.
pub fn build_groups(ts: &TokenStream) -> Result<TokenTree, LexError> {
    build_groups_from(ts.tokens().iter().cloned())
}

pub(crate) fn build_groups_from<I>(tokens: I) -> Result<TokenTree, LexError>
where
    I: IntoIterator<Item = Token>,
{
    // stack of (open token, siblings collected so far)
    let mut stack: Vec<(Token, Vec<Node>)> = Vec::new();
    let mut top: Vec<Node> = Vec::new();

    for tok in tokens {
        match tok.kind {
            TokenKind::GroupOpen => {
                stack.push((tok, std::mem::take(&mut top)));
            }
            TokenKind::GroupClose => {
                let Some((open, parent)) = stack.pop() else {
                    return Err(LexError::UnbalancedGroup {
                        position: tok.span.start,
                    });
                };
                let children = std::mem::replace(&mut top, parent);
                top.push(Node::Group {
                    open,
                    children,
                    close: tok,
                });
            }
            _ => top.push(Node::Leaf(tok)),
        }
    }
    if let Some((open, _)) = stack.first() {
        return Err(LexError::UnbalancedGroup {
            position: open.span.start,
        });
    }
    Ok(TokenTree { nodes: top })
}
