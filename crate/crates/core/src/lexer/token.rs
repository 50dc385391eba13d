//! Lossless LaTeX tokenization with fixed (standard) category codes.

use std::fmt;

/// Byte range into the source a token was read from.
///
/// Tokens synthesized by later stages carry the span of the source region
/// they replace, so they can always be traced back to original bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Smallest span covering both.
    pub fn cover(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TokenKind {
    /// `\name` or a control symbol such as `\,`. The name excludes the
    /// backslash. A lone backslash at end of input has an empty name.
    ControlSequence(String),
    Character(char),
    GroupOpen,
    GroupClose,
    MathShift,
    Superscript,
    Subscript,
    AlignmentTab,
    /// Comment text including the leading `%`, excluding the newline.
    Comment(String),
    Whitespace(String),
}

impl TokenKind {
    pub fn cs(name: &str) -> Self {
        TokenKind::ControlSequence(name.to_owned())
    }

    pub fn is_cs(&self, name: &str) -> bool {
        matches!(self, TokenKind::ControlSequence(n) if n == name)
    }

    pub fn is_char(&self, c: char) -> bool {
        matches!(self, TokenKind::Character(x) if *x == c)
    }

    pub fn cs_name(&self) -> Option<&str> {
        match self {
            TokenKind::ControlSequence(n) => Some(n),
            _ => None,
        }
    }

    /// Control word made of letters (as opposed to a control symbol).
    pub fn is_control_word(&self) -> bool {
        matches!(self, TokenKind::ControlSequence(n) if n.chars().next().is_some_and(|c| c.is_ascii_alphabetic()))
    }

    /// Writes the source form of this token.
    pub fn write_to(&self, out: &mut String) {
        match self {
            TokenKind::ControlSequence(name) => {
                out.push('\\');
                out.push_str(name);
            }
            TokenKind::Character(c) => out.push(*c),
            TokenKind::GroupOpen => out.push('{'),
            TokenKind::GroupClose => out.push('}'),
            TokenKind::MathShift => out.push('$'),
            TokenKind::Superscript => out.push('^'),
            TokenKind::Subscript => out.push('_'),
            TokenKind::AlignmentTab => out.push('&'),
            TokenKind::Comment(text) | TokenKind::Whitespace(text) => out.push_str(text),
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_to(&mut s);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    /// Set on tokens produced by a semantic replacement; such tokens are
    /// never matched again.
    pub inert: bool,
}

impl Token {
    pub fn new(kind: TokenKind, span: Span) -> Self {
        Self {
            kind,
            span,
            inert: false,
        }
    }
}

/// Flat token sequence as produced by [`tokenize`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream(pub Vec<Token>);

impl TokenStream {
    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn kinds(&self) -> Vec<TokenKind> {
        self.0.iter().map(|t| t.kind.clone()).collect()
    }
}

impl From<Vec<Token>> for TokenStream {
    fn from(v: Vec<Token>) -> Self {
        TokenStream(v)
    }
}

impl IntoIterator for TokenStream {
    type Item = Token;
    type IntoIter = std::vec::IntoIter<Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

fn is_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

/// Splits `source` into tokens. Total: every byte lands in exactly one span.
pub fn tokenize(source: &str) -> TokenStream {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut chars = source.char_indices().peekable();

    while let Some((start, c)) = chars.next() {
        let kind = match c {
            '\\' => match chars.peek().copied() {
                None => TokenKind::ControlSequence(String::new()),
                Some((_, n)) if n.is_ascii_alphabetic() => {
                    let mut name = String::new();
                    while let Some(&(_, n)) = chars.peek() {
                        if !n.is_ascii_alphabetic() {
                            break;
                        }
                        name.push(n);
                        chars.next();
                    }
                    TokenKind::ControlSequence(name)
                }
                Some((_, n)) => {
                    chars.next();
                    TokenKind::ControlSequence(n.to_string())
                }
            },
            '%' => {
                let mut end = start + 1;
                while let Some(&(i, n)) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    end = i + n.len_utf8();
                    chars.next();
                }
                TokenKind::Comment(source[start..end].to_owned())
            }
            c if is_space(c) => {
                let mut end = start + 1;
                while let Some(&(i, n)) = chars.peek() {
                    if !is_space(n) {
                        break;
                    }
                    end = i + 1;
                    chars.next();
                }
                TokenKind::Whitespace(source[start..end].to_owned())
            }
            '{' => TokenKind::GroupOpen,
            '}' => TokenKind::GroupClose,
            '$' => TokenKind::MathShift,
            '^' => TokenKind::Superscript,
            '_' => TokenKind::Subscript,
            '&' => TokenKind::AlignmentTab,
            c => TokenKind::Character(c),
        };
        let end = chars.peek().map_or(bytes.len(), |&(i, _)| i);
        out.push(Token::new(kind, Span::new(start, end)));
    }
    TokenStream(out)
}

/// Renders tokens back to source text.
///
/// A control word directly followed by a letter gets one separating space;
/// this never happens on [`tokenize`] output, so the round trip is exact.
pub fn detokenize<'a, I>(tokens: I) -> String
where
    I: IntoIterator<Item = &'a Token>,
{
    detokenize_kinds(tokens.into_iter().map(|t| &t.kind))
}

pub fn detokenize_kinds<'a, I>(kinds: I) -> String
where
    I: IntoIterator<Item = &'a TokenKind>,
{
    let mut out = String::new();
    let mut prev_word = false;
    for kind in kinds {
        if prev_word {
            if let TokenKind::Character(c) = kind {
                if c.is_ascii_alphabetic() {
                    out.push(' ');
                }
            }
        }
        kind.write_to(&mut out);
        prev_word = kind.is_control_word();
    }
    out
}
