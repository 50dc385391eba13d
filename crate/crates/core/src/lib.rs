//! Semantic enrichment of generic LaTeX formula sources.
//!
//! The pipeline stages live in separate modules: [`lexer`] tokenizes and
//! finds math, [`canon`] collapses presentation variants, [`macros`]
//! rewrites presentation patterns into semantic macros, [`metadata`]
//! segments formulae and harvests their annotations, and [`page`] renders
//! formula home pages and the MediaWiki dump.

pub mod canon;
pub mod error;
pub mod lexer;
pub mod macros;
pub mod metadata;
pub mod page;

pub use canon::{CanonConfig, CanonicalTree, Canonicalizer};
pub use error::{CanonError, ExtractError, GlossaryError, LexError, PageError, StripError};
pub use lexer::{
    build_groups, detokenize, extract_math, tokenize, MathEnv, MathSpan, Node, Span, Token,
    TokenKind, TokenStream, TokenTree,
};
pub use macros::{AtVariant, Glossary, MacroRule, ReplacementStats};
pub use metadata::{
    Annotation, AnnotationKind, Citation, Extraction, Extractor, ExtractorConfig, Formula,
    SubstitutionDef,
};
pub use page::{
    build_symbols_list, emit_dump, render_page, stats_report, BibEntry, Bibliography, FormulaPage,
    Report, SiteInfo, SymbolsListEntry, WikiDump,
};
