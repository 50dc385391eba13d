//! Semantic rewriting of LaTeX sources for human review: only math bodies
//! that gain a semantic macro change, everything else stays byte-identical.

use semtex_core::lexer::SourceDocument;
use semtex_core::{Glossary, LexError, ReplacementStats};

#[derive(Debug, Clone, PartialEq)]
pub struct Rewrite {
    pub text: String,
    pub stats: ReplacementStats,
    /// Math spans left untouched because they failed to canonicalize.
    pub issues: Vec<String>,
}

pub fn rewrite_source(source: &str, g: &Glossary) -> Result<Rewrite, LexError> {
    let doc = SourceDocument::parse(source)?;
    let mut text = String::with_capacity(source.len());
    let mut stats = ReplacementStats::default();
    let mut issues = Vec::new();
    let mut at = 0;
    for m in &doc.math {
        let original = doc.text(m.span);
        let canonical = match g.canonicalizer().canonicalize(&m.body) {
            Ok(c) => c,
            Err(e) => {
                issues.push(format!("byte {}: {e}", m.span.start));
                continue;
            }
        };
        let (replaced, s) = g.replace_all(&canonical);
        stats.merge(&s);
        if s.total == 0 {
            continue;
        }
        // keep the surrounding layout of the body
        let lead = &original[..original.len() - original.trim_start().len()];
        let trail = &original[original.trim_end().len()..];
        text.push_str(&source[at..m.span.start]);
        text.push_str(lead);
        text.push_str(&replaced.to_latex());
        text.push_str(trail);
        at = m.span.end;
    }
    text.push_str(&source[at..]);
    Ok(Rewrite {
        text,
        stats,
        issues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rewrite(s: &str) -> String {
        rewrite_source(s, &Glossary::shipped()).unwrap().text
    }

    #[test]
    fn only_touched_math_changes() {
        let src = "Text with $x+y$ and $\\Gamma( z )$.\n% keep\n\\begin{equation}\n  a = b\n\\end{equation}\n";
        assert_eq!(rewrite(src), "Text with $x+y$ and $\\EulerGamma@{z}$.\n% keep\n\\begin{equation}\n  a = b\n\\end{equation}\n");
    }

    #[test]
    fn alignment_rows_rewritten_separately() {
        let src = "\\begin{align}\n  \\sin z &= 1 \\\\\n  y &= 2\n\\end{align}";
        assert_eq!(
            rewrite(src),
            "\\begin{align}\n  \\sin@@{z}=1 \\\\\n  y &= 2\n\\end{align}"
        );
    }

    #[test]
    fn labels_survive() {
        let src = "\\begin{equation}\\label{5.2.1}\\Gamma(z)\\end{equation}";
        assert_eq!(
            rewrite(src),
            "\\begin{equation}\\label{5.2.1}\\EulerGamma@{z}\\end{equation}"
        );
    }

    #[test]
    fn rewriting_is_stable() {
        let src = "$p_n(x;a\\mid q)$ and $(a;q)_n$";
        let once = rewrite(src);
        assert_eq!(rewrite(&once), once);
        let r = rewrite_source(&once, &Glossary::shipped()).unwrap();
        assert_eq!(r.stats.total, 0);
    }

    #[test]
    fn unbalanced_source_rejected() {
        assert!(rewrite_source("$\\frac{1}{2$", &Glossary::shipped()).is_err());
    }
}
