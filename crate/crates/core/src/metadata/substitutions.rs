use std::collections::BTreeMap;

use super::constraints::paren_depths;
use super::{Annotation, AnnotationKind, Extractor, Formula, Origin};
use crate::canon::CanonicalTree;
use crate::error::ExtractError;
use crate::lexer::{flatten_nodes, Node, TokenKind, TokenTree};
use crate::macros::Glossary;

/// An auxiliary definition `H = RHS` used by other formulae of its unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionDef {
    /// Token kinds of `H` without any application arguments.
    pub lhs_head: Vec<TokenKind>,
    pub rhs: CanonicalTree,
    /// The full definition as semantic LaTeX.
    pub equation: String,
    pub def_formula_id: String,
    pub unit: usize,
}

/// End of a simple symbol at `pos`: a letter or a control word that is not
/// a glossary macro, with at most one subscript and one superscript.
fn simple_symbol(nodes: &[Node], pos: usize, g: &Glossary) -> Option<usize> {
    let ok = match nodes.get(pos)?.kind()? {
        TokenKind::Character(c) => c.is_alphabetic(),
        k @ TokenKind::ControlSequence(name) => k.is_control_word() && !g.contains(name),
        _ => false,
    };
    if !ok {
        return None;
    }
    let mut i = pos + 1;
    let (mut sub, mut sup) = (false, false);
    loop {
        let seen = match nodes.get(i).and_then(Node::kind) {
            Some(TokenKind::Subscript) => &mut sub,
            Some(TokenKind::Superscript) => &mut sup,
            _ => break,
        };
        if *seen || nodes.get(i + 1).is_none() {
            break;
        }
        *seen = true;
        i += 2;
    }
    Some(i)
}

/// The head of a substitution left side: a simple symbol, optionally
/// applied to a parenthesized list of simple symbols.
fn lhs_head<'n>(lhs: &'n [Node], g: &Glossary) -> Option<&'n [Node]> {
    let end = simple_symbol(lhs, 0, g)?;
    if end == lhs.len() {
        return Some(lhs);
    }
    if !lhs[end].is_char('(') {
        return None;
    }
    let mut k = end + 1;
    loop {
        k = simple_symbol(lhs, k, g)?;
        match lhs.get(k) {
            Some(n) if n.is_char(',') => k += 1,
            Some(n) if n.is_char(')') => break,
            _ => return None,
        }
    }
    (k + 1 == lhs.len()).then_some(&lhs[..end])
}

fn kinds(nodes: &[Node]) -> Vec<TokenKind> {
    flatten_nodes(nodes)
        .into_iter()
        .map(|t| t.kind.clone())
        .collect()
}

fn occurs(needle: &[TokenKind], hay: &[TokenKind]) -> bool {
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Splits `H = RHS` at its only top-level `=`.
fn equation_parts(nodes: &[Node]) -> Option<(&[Node], &[Node])> {
    let depths = paren_depths(nodes);
    let mut eqs = (0..nodes.len()).filter(|&i| depths[i] == 0 && nodes[i].is_char('='));
    let at = eqs.next()?;
    if eqs.next().is_some() {
        return None;
    }
    Some((&nodes[..at], &nodes[at + 1..]))
}

impl Extractor<'_> {
    /// Formulae of the form `H = RHS` whose head `H` reappears in another
    /// formula of the same sectional unit.
    pub fn detect_substitutions(&self, fs: &[Formula]) -> Vec<SubstitutionDef> {
        let flat: Vec<Vec<TokenKind>> = fs.iter().map(|f| kinds(&f.semantic.tree.nodes)).collect();
        let mut defs = Vec::new();
        for (i, f) in fs.iter().enumerate() {
            let Some((lhs, rhs)) = equation_parts(&f.semantic.tree.nodes) else {
                continue;
            };
            let Some(head) = lhs_head(lhs, self.glossary) else {
                continue;
            };
            let head = kinds(head);
            let used = fs
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && o.unit == f.unit && occurs(&head, &flat[j]));
            if used {
                defs.push(SubstitutionDef {
                    lhs_head: head,
                    rhs: CanonicalTree::new(TokenTree::new(rhs.to_vec())),
                    equation: f.source_semantic.clone(),
                    def_formula_id: f.id.clone(),
                    unit: f.unit,
                });
            }
        }
        defs
    }

    /// Attaches every used definition (and, depth first, the definitions it
    /// uses) to the formulae referencing it, and drops the definition
    /// formulae from the main list. Returns `(kept, removed)`.
    pub fn inline_substitutions(
        &self,
        fs: Vec<Formula>,
        defs: &[SubstitutionDef],
    ) -> Result<(Vec<Formula>, Vec<Formula>), ExtractError> {
        if defs.is_empty() {
            return Ok((fs, Vec::new()));
        }
        let refs: Vec<Vec<usize>> = defs
            .iter()
            .map(|d| {
                let rhs = kinds(&d.rhs.tree.nodes);
                (0..defs.len())
                    .filter(|&e| defs[e].unit == d.unit && occurs(&defs[e].lhs_head, &rhs))
                    .collect()
            })
            .collect();
        check_cycles(defs, &refs)?;

        let def_ids: BTreeMap<&str, usize> = defs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.def_formula_id.as_str(), i))
            .collect();
        let (removed, mut kept): (Vec<Formula>, Vec<Formula>) = fs
            .into_iter()
            .partition(|f| def_ids.contains_key(f.id.as_str()));
        for f in &mut kept {
            let flat = kinds(&f.semantic.tree.nodes);
            let mut order = Vec::new();
            for (d, def) in defs.iter().enumerate() {
                if def.unit == f.unit && occurs(&def.lhs_head, &flat) {
                    visit(d, &refs, &mut order);
                }
            }
            for d in order {
                let def = &defs[d];
                f.annotate(Annotation::new(
                    AnnotationKind::Substitution,
                    def.equation.clone(),
                    Origin::Formula(def.def_formula_id.clone()),
                ));
            }
        }
        Ok((kept, removed))
    }
}

fn visit(d: usize, refs: &[Vec<usize>], order: &mut Vec<usize>) {
    if order.contains(&d) {
        return;
    }
    order.push(d);
    for &e in &refs[d] {
        visit(e, refs, order);
    }
}

fn check_cycles(defs: &[SubstitutionDef], refs: &[Vec<usize>]) -> Result<(), ExtractError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn dfs(
        d: usize,
        refs: &[Vec<usize>],
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        marks[d] = Mark::Active;
        stack.push(d);
        for &e in &refs[d] {
            match marks[e] {
                Mark::Active => {
                    let from = stack.iter().position(|&s| s == e).unwrap_or(0);
                    let mut cycle = stack[from..].to_vec();
                    cycle.push(e);
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = dfs(e, refs, marks, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks[d] = Mark::Done;
        None
    }
    let mut marks = vec![Mark::New; defs.len()];
    for d in 0..defs.len() {
        if marks[d] == Mark::New {
            if let Some(cycle) = dfs(d, refs, &mut marks, &mut Vec::new()) {
                return Err(ExtractError::SubstitutionCycle(
                    cycle
                        .into_iter()
                        .map(|i| defs[i].def_formula_id.clone())
                        .collect(),
                ));
            }
        }
    }
    Ok(())
}
