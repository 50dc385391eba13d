//! Tokenizer, brace-group trees and math-span extraction.

mod math;
mod token;
mod tree;

pub use math::{extract_math, MathEnv, MathSpan, SourceDocument};
pub use token::{detokenize, detokenize_kinds, tokenize, Span, Token, TokenKind, TokenStream};
pub use tree::{build_groups, flatten_nodes, nodes_to_latex, Node, TokenTree};
