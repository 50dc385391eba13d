//! A coarse reading of the prose around the math: headings, sentences,
//! display formulae and proof comments, in document order.

use crate::lexer::{SourceDocument, Span, Token, TokenKind};

/// Placeholder for inline math inside [`Sentence::plain`].
pub(crate) const MATH_MARK: char = '\u{FFFC}';

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Seg {
    Text(String),
    /// Index into `SourceDocument::math`.
    Math(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Sentence {
    pub segs: Vec<Seg>,
    pub span: Span,
}

impl Sentence {
    /// Text with every inline formula replaced by [`MATH_MARK`].
    pub fn plain(&self) -> String {
        let mut s = String::new();
        for seg in &self.segs {
            match seg {
                Seg::Text(t) => s.push_str(t),
                Seg::Math(_) => s.push(MATH_MARK),
            }
        }
        collapse(&s)
    }

    pub fn math(&self) -> impl Iterator<Item = usize> + '_ {
        self.segs.iter().filter_map(|s| match s {
            Seg::Math(i) => Some(*i),
            Seg::Text(_) => None,
        })
    }

    /// Renders the sentence, formatting each inline formula with `math`.
    pub fn render(&self, mut math: impl FnMut(usize) -> String) -> String {
        let mut s = String::new();
        for seg in &self.segs {
            match seg {
                Seg::Text(t) => s.push_str(t),
                Seg::Math(i) => {
                    s.push('$');
                    s.push_str(&math(*i));
                    s.push('$');
                }
            }
        }
        collapse(&s)
    }
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Item {
    Heading {
        level: u8,
        title: String,
    },
    Sentence(Sentence),
    /// `new_env` is false for the second and later rows of one environment.
    Display {
        math: usize,
        new_env: bool,
    },
    Proof {
        text: String,
        span: Span,
    },
    /// Blank line.
    Break,
}

const SKIP_WITH_ARG: &[&str] = &[
    "label", "ref", "eqref", "cite", "index", "begin", "end", "nonumber", "notag",
];

struct Walker<'a> {
    toks: &'a [Token],
    items: Vec<Item>,
    frag: Vec<Seg>,
    frag_span: Option<Span>,
    new_env: bool,
}

impl<'a> Walker<'a> {
    fn push_text(&mut self, s: &str, span: Span) {
        if let Some(Seg::Text(t)) = self.frag.last_mut() {
            t.push_str(s);
        } else {
            self.frag.push(Seg::Text(s.to_owned()));
        }
        self.extend_span(span);
    }

    fn extend_span(&mut self, span: Span) {
        self.frag_span = Some(self.frag_span.map_or(span, |s| s.cover(span)));
    }

    fn flush(&mut self) {
        let segs = std::mem::take(&mut self.frag);
        let span = self.frag_span.take().unwrap_or_default();
        for sentence in split_sentences(segs, span) {
            self.items.push(Item::Sentence(sentence));
        }
    }

    /// Index just past the brace group starting at `i` (after optional
    /// whitespace), or `i` if there is none.
    fn skip_group(&self, mut i: usize) -> usize {
        while matches!(self.toks.get(i).map(|t| &t.kind), Some(TokenKind::Whitespace(w)) if !w.contains('\n'))
        {
            i += 1;
        }
        if !matches!(
            self.toks.get(i).map(|t| &t.kind),
            Some(TokenKind::GroupOpen)
        ) {
            return i;
        }
        let mut depth = 0usize;
        while let Some(t) = self.toks.get(i) {
            match t.kind {
                TokenKind::GroupOpen => depth += 1,
                TokenKind::GroupClose => {
                    depth -= 1;
                    if depth == 0 {
                        return i + 1;
                    }
                }
                _ => {}
            }
            i += 1;
        }
        i
    }

    fn group_text(&self, from: usize, to: usize) -> String {
        let mut s = String::new();
        for t in &self.toks[from..to] {
            match &t.kind {
                TokenKind::Character(c) => s.push(*c),
                TokenKind::Whitespace(_) => s.push(' '),
                TokenKind::ControlSequence(n)
                    if n.chars().count() == 1 && !n.chars().all(|c| c.is_ascii_alphabetic()) =>
                {
                    s.push_str(n)
                }
                _ => {}
            }
        }
        collapse(&s)
    }
}

pub(crate) fn outline(doc: &SourceDocument) -> Vec<Item> {
    let toks = doc.tokens.tokens();
    let mut w = Walker {
        toks,
        items: Vec::new(),
        frag: Vec::new(),
        frag_span: None,
        new_env: true,
    };
    let mut m = 0;
    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        // math swallowed by a heading or a skipped argument
        while doc
            .math
            .get(m)
            .is_some_and(|ms| ms.span.start < t.span.start && ms.span.end <= t.span.start)
        {
            m += 1;
        }
        if let Some(ms) = doc.math.get(m).filter(|ms| t.span.start >= ms.span.start) {
            if ms.is_display() {
                w.flush();
                w.items.push(Item::Display {
                    math: m,
                    new_env: w.new_env,
                });
                w.new_env = false;
            } else {
                w.frag.push(Seg::Math(m));
                w.extend_span(ms.span);
            }
            while toks.get(i).is_some_and(|t| t.span.start < ms.span.end) {
                i += 1;
            }
            m += 1;
            continue;
        }
        match &t.kind {
            TokenKind::ControlSequence(n) => {
                let n = n.as_str();
                match n {
                    "section" | "subsection" => {
                        let mut j = i + 1;
                        if toks.get(j).is_some_and(|t| t.kind.is_char('*')) {
                            j += 1;
                        }
                        let end = w.skip_group(j);
                        let title = w.group_text(j, end);
                        w.flush();
                        w.items.push(Item::Heading {
                            level: if n == "section" { 1 } else { 2 },
                            title,
                        });
                        w.new_env = true;
                        i = end;
                        continue;
                    }
                    "[" => w.new_env = true,
                    "begin" => {
                        w.new_env = true;
                        i = w.skip_group(i + 1);
                        continue;
                    }
                    _ if SKIP_WITH_ARG.contains(&n) => {
                        i = w.skip_group(i + 1);
                        continue;
                    }
                    "\\" | "]" => {}
                    " " => w.push_text(" ", t.span),
                    _ if n.chars().count() == 1 && !n.chars().all(|c| c.is_ascii_alphabetic()) => {
                        w.push_text(n, t.span)
                    }
                    _ => {}
                }
            }
            TokenKind::Character('~') => w.push_text(" ", t.span),
            TokenKind::Character(c) => w.push_text(c.encode_utf8(&mut [0; 4]), t.span),
            TokenKind::Whitespace(s) => {
                if s.matches('\n').count() >= 2 {
                    w.flush();
                    w.items.push(Item::Break);
                } else {
                    w.push_text(" ", t.span);
                }
            }
            TokenKind::MathShift => w.new_env = true,
            TokenKind::Comment(c) => {
                let body = c.trim_start_matches('%').trim();
                if let Some(rest) = body.strip_prefix("proof:") {
                    w.items.push(Item::Proof {
                        text: rest.trim().to_owned(),
                        span: t.span,
                    });
                }
            }
            _ => {}
        }
        i += 1;
    }
    w.flush();
    w.items
}

/// Splits at `.`, `?` or `!` followed by whitespace or the end of the
/// fragment.
fn split_sentences(segs: Vec<Seg>, span: Span) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut cur: Vec<Seg> = Vec::new();
    let n = segs.len();
    for (k, seg) in segs.into_iter().enumerate() {
        match seg {
            Seg::Math(i) => cur.push(Seg::Math(i)),
            Seg::Text(text) => {
                let last = k + 1 == n;
                let chars: Vec<char> = text.chars().collect();
                let mut buf = String::new();
                for (j, &c) in chars.iter().enumerate() {
                    buf.push(c);
                    let next = chars.get(j + 1);
                    let ends = matches!(c, '.' | '?' | '!')
                        && match next {
                            Some(nc) => nc.is_whitespace(),
                            None => last,
                        };
                    if ends {
                        cur.push(Seg::Text(std::mem::take(&mut buf)));
                        out.push(std::mem::take(&mut cur));
                    }
                }
                if !buf.is_empty() {
                    cur.push(Seg::Text(buf));
                }
            }
        }
    }
    out.push(cur);
    out.into_iter()
        .map(|segs| Sentence { segs, span })
        .filter(|s| {
            s.segs
                .iter()
                .any(|seg| !matches!(seg, Seg::Text(t) if t.trim().is_empty()))
        })
        .collect()
}
