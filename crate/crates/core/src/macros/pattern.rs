//! Surface patterns matched against canonical token trees.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::lexer::{tokenize, Node, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CaptureMode {
    /// Maximal run up to the next separator or closing delimiter at the same
    /// nesting depth.
    #[default]
    Balanced,
    /// One brace group, or a single operand token (`_n` and `_{n}` alike).
    Group,
    /// One letter, digit or control word, or a brace group.
    Token,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternAtom {
    Literal(TokenKind),
    Capture { name: String, mode: CaptureMode },
    Separator(char),
    Open(char),
    Close(char),
}

/// One atom as written in a glossary file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtomSpec {
    Literal {
        lit: String,
    },
    Capture {
        cap: String,
        #[serde(default)]
        mode: CaptureMode,
    },
    Separator {
        sep: char,
    },
    Open {
        open: char,
    },
    Close {
        close: char,
    },
}

pub const SEPARATORS: [char; 3] = [',', ';', '|'];

fn closing_for(open: char) -> Option<char> {
    match open {
        '(' => Some(')'),
        '[' => Some(']'),
        '{' => Some('}'),
        _ => None,
    }
}

/// Expands file atoms into pattern atoms; literal strings may hold several
/// tokens (`"P_"`), whitespace inside them is ignored.
pub fn expand_atoms(specs: &[AtomSpec]) -> Result<Vec<PatternAtom>, String> {
    let mut out = Vec::new();
    for spec in specs {
        match spec {
            AtomSpec::Literal { lit } => {
                for t in tokenize(lit) {
                    match t.kind {
                        TokenKind::Whitespace(_) => {}
                        TokenKind::GroupOpen | TokenKind::GroupClose => {
                            return Err(format!("literal `{lit}` contains a brace; use open/close atoms"))
                        }
                        TokenKind::Comment(_) | TokenKind::AlignmentTab | TokenKind::MathShift => {
                            return Err(format!("literal `{lit}` contains a token that never survives canonicalization"))
                        }
                        k => out.push(PatternAtom::Literal(k)),
                    }
                }
            }
            AtomSpec::Capture { cap, mode } => out.push(PatternAtom::Capture {
                name: cap.clone(),
                mode: *mode,
            }),
            AtomSpec::Separator { sep } => {
                if !SEPARATORS.contains(sep) {
                    return Err(format!("`{sep}` is not a separator"));
                }
                out.push(PatternAtom::Separator(*sep));
            }
            AtomSpec::Open { open } => out.push(PatternAtom::Open(*open)),
            AtomSpec::Close { close } => out.push(PatternAtom::Close(*close)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PatNode {
    Lit(TokenKind),
    Char(char),
    Cap(String, CaptureMode),
    Brace(Vec<PatNode>),
}

/// Checks nesting and capture uniqueness, and nests `{ ... }` atoms.
pub(crate) fn compile(atoms: &[PatternAtom]) -> Result<Vec<PatNode>, String> {
    let mut seen = HashSet::new();
    let mut stack: Vec<(char, Vec<PatNode>)> = Vec::new();
    let mut top = Vec::new();
    for atom in atoms {
        match atom {
            PatternAtom::Literal(k) => top.push(PatNode::Lit(k.clone())),
            PatternAtom::Separator(c) => top.push(PatNode::Char(*c)),
            PatternAtom::Capture { name, mode } => {
                if !seen.insert(name.clone()) {
                    return Err(format!("capture `{name}` appears twice"));
                }
                top.push(PatNode::Cap(name.clone(), *mode));
            }
            PatternAtom::Open(c) => {
                if closing_for(*c).is_none() {
                    return Err(format!("`{c}` cannot open a group"));
                }
                if *c != '{' {
                    top.push(PatNode::Char(*c));
                }
                stack.push((*c, std::mem::take(&mut top)));
            }
            PatternAtom::Close(c) => {
                let Some((open, parent)) = stack.pop() else {
                    return Err(format!("`{c}` closes nothing"));
                };
                if closing_for(open) != Some(*c) {
                    return Err(format!("`{open}` closed by `{c}`"));
                }
                if open == '{' {
                    let inner = std::mem::replace(&mut top, parent);
                    top.push(PatNode::Brace(inner));
                } else {
                    let mut inner = std::mem::replace(&mut top, parent);
                    top.append(&mut inner);
                    top.push(PatNode::Char(*c));
                }
            }
        }
    }
    if let Some((open, _)) = stack.last() {
        return Err(format!("`{open}` is never closed"));
    }
    if top.is_empty() {
        return Err("empty pattern".into());
    }
    if matches!(top.first(), Some(PatNode::Cap(..))) {
        return Err("pattern must not start with a capture".into());
    }
    Ok(top)
}

pub(crate) fn capture_names(pat: &[PatNode], out: &mut Vec<String>) {
    for p in pat {
        match p {
            PatNode::Cap(n, _) => out.push(n.clone()),
            PatNode::Brace(inner) => capture_names(inner, out),
            _ => {}
        }
    }
}

pub type Captures = BTreeMap<String, Vec<Node>>;

fn leaf_char(n: &Node) -> Option<char> {
    match n.kind()? {
        TokenKind::Character(c) => Some(*c),
        _ => None,
    }
}

fn is_group_operand(n: &Node) -> bool {
    match n.kind() {
        Some(TokenKind::Character(c)) => !"()[],;|=<>+-".contains(*c),
        Some(TokenKind::ControlSequence(name)) => !name.is_empty(),
        _ => false,
    }
}

fn is_token_operand(n: &Node) -> bool {
    match n.kind() {
        Some(TokenKind::Character(c)) => c.is_alphanumeric(),
        Some(k) => k.is_control_word(),
        None => false,
    }
}

/// Matches `pat` against `nodes` from `pos`; returns the end position.
pub(crate) fn match_seq(
    pat: &[PatNode],
    nodes: &[Node],
    mut pos: usize,
    caps: &mut Captures,
) -> Option<usize> {
    for p in pat {
        match p {
            PatNode::Lit(kind) => {
                let t = nodes.get(pos)?.leaf()?;
                if t.inert || &t.kind != kind {
                    return None;
                }
                pos += 1;
            }
            PatNode::Char(c) => {
                let t = nodes.get(pos)?.leaf()?;
                if t.inert || !t.kind.is_char(*c) {
                    return None;
                }
                pos += 1;
            }
            PatNode::Brace(inner) => {
                let node = nodes.get(pos)?;
                let Node::Group {
                    open,
                    children,
                    close,
                } = node
                else {
                    return None;
                };
                if open.inert || close.inert {
                    return None;
                }
                if match_seq(inner, children, 0, caps)? != children.len() {
                    return None;
                }
                pos += 1;
            }
            PatNode::Cap(name, mode) => {
                let start = pos;
                match mode {
                    CaptureMode::Balanced => {
                        let mut depth = 0usize;
                        while let Some(n) = nodes.get(pos) {
                            if let Some(c) = leaf_char(n) {
                                if depth == 0 && (SEPARATORS.contains(&c) || c == ')' || c == ']') {
                                    break;
                                }
                                match c {
                                    '(' | '[' => depth += 1,
                                    ')' | ']' => depth -= 1,
                                    _ => {}
                                }
                            }
                            pos += 1;
                        }
                        if depth != 0 || pos == start {
                            return None;
                        }
                        let content = &nodes[start..pos];
                        if content.iter().any(Node::any_inert) {
                            return None;
                        }
                        caps.insert(name.clone(), content.to_vec());
                    }
                    CaptureMode::Group | CaptureMode::Token => {
                        let n = nodes.get(pos)?;
                        if n.any_inert() {
                            return None;
                        }
                        let content = match n {
                            Node::Group { children, .. } => children.clone(),
                            leaf if *mode == CaptureMode::Group && is_group_operand(leaf) => {
                                vec![leaf.clone()]
                            }
                            leaf if *mode == CaptureMode::Token && is_token_operand(leaf) => {
                                vec![leaf.clone()]
                            }
                            _ => return None,
                        };
                        caps.insert(name.clone(), content);
                        pos += 1;
                    }
                }
            }
        }
    }
    Some(pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> AtomSpec {
        AtomSpec::Literal { lit: s.into() }
    }

    #[test]
    fn literal_strings_expand() {
        let atoms = expand_atoms(&[lit("P_")]).unwrap();
        assert_eq!(
            atoms,
            vec![
                PatternAtom::Literal(TokenKind::Character('P')),
                PatternAtom::Literal(TokenKind::Subscript)
            ]
        );
    }

    #[test]
    fn brace_literals_rejected() {
        assert!(expand_atoms(&[lit("{")]).is_err());
    }

    #[test]
    fn nesting_checked() {
        let open = PatternAtom::Open('(');
        let close_sq = PatternAtom::Close(']');
        let l = PatternAtom::Literal(TokenKind::Character('x'));
        assert!(compile(&[l.clone(), open.clone(), close_sq]).is_err());
        assert!(compile(&[l.clone(), open.clone()]).is_err());
        assert!(compile(&[l.clone(), open, PatternAtom::Close(')')]).is_ok());
    }

    #[test]
    fn duplicate_capture_rejected() {
        let l = PatternAtom::Literal(TokenKind::Character('x'));
        let c = PatternAtom::Capture {
            name: "a".into(),
            mode: CaptureMode::Token,
        };
        assert!(compile(&[l, c.clone(), c]).is_err());
    }

    #[test]
    fn atom_spec_json() {
        let v: Vec<AtomSpec> =
            serde_json::from_str(r#"[{"lit":"\\Gamma"},{"open":"("},{"cap":"z"},{"sep":";"},{"cap":"w","mode":"token"},{"close":")"}]"#)
                .unwrap();
        assert_eq!(
            v[2],
            AtomSpec::Capture {
                cap: "z".into(),
                mode: CaptureMode::Balanced
            }
        );
        assert_eq!(v[3], AtomSpec::Separator { sep: ';' });
        assert_eq!(
            v[4],
            AtomSpec::Capture {
                cap: "w".into(),
                mode: CaptureMode::Token
            }
        );
    }
}
