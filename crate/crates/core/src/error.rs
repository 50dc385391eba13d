use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unbalanced brace group at byte {position}")]
    UnbalancedGroup { position: usize },
    #[error("unterminated {name} environment opened at byte {position}")]
    UnterminatedEnvironment { name: String, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("\\left/\\right mismatch at byte {position}")]
    MismatchedLeftRight { position: usize },
}

#[derive(Debug, Error)]
pub enum GlossaryError {
    #[error("failed to read glossary: {0}")]
    Io(#[from] std::io::Error),
    #[error("glossary parse error at line {line}: {reason}")]
    GlossaryParse { line: usize, reason: String },
    #[error("duplicate macro `{0}`")]
    DuplicateMacro(String),
    #[error("template placeholders of `{0}` do not match its pattern captures")]
    TemplateCaptureMismatch(String),
    #[error("invalid rule `{name}`: {reason}")]
    InvalidRule { name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StripError {
    #[error("unknown semantic macro `\\{0}`")]
    UnknownSemanticMacro(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("substitution cycle through {}", .0.join(" -> "))]
    SubstitutionCycle(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PageError {
    #[error("no bibliography entry for `{0}`")]
    MissingBibEntry(String),
    #[error("duplicate page title `{0}`")]
    DuplicateTitle(String),
}
