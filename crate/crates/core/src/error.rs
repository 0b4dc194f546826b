use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("relative IRI <{0}> used where an absolute IRI is required")]
    RelativeIri(String),
}

/// Location of a token in the source text. Lines and columns are 1-based;
/// columns count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    UnknownPrefix(String),
    RelativeIriWithoutBase(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            span,
            message: message.into(),
        }
    }

    /// Formats the error as `file:line:column: message`.
    pub fn display_with_source(&self, source: &str) -> String {
        format!(
            "{source}:{}:{}: {}",
            self.span.line, self.span.column, self.message
        )
    }
}

#[derive(Debug, Error)]
pub enum WebError {
    #[error("{iri}: network access disabled and no fixture or cached copy")]
    Offline { iri: String },
    #[error("{iri}: HTTP status {status}")]
    Status { iri: String, status: u16 },
    #[error("{iri}: request timed out")]
    Timeout { iri: String },
    #[error("{iri}: {message}")]
    Fetch { iri: String, message: String },
    #[error("{iri}: unsupported scheme")]
    UnsupportedScheme { iri: String },
    #[error("{iri}: cannot read {path}: {source}")]
    Io {
        iri: String,
        path: String,
        source: std::io::Error,
    },
    #[error("{iri}: media type {media_type} has no N3 semantics")]
    UnsupportedMediaType { iri: String, media_type: String },
    #[error("{iri}: {error}")]
    Parse { iri: String, error: ParseError },
    #[error("fixture map line {line}: {message}")]
    FixtureMap { line: usize, message: String },
}

impl WebError {
    pub fn iri(&self) -> Option<&str> {
        match self {
            WebError::Offline { iri }
            | WebError::Status { iri, .. }
            | WebError::Timeout { iri }
            | WebError::Fetch { iri, .. }
            | WebError::UnsupportedScheme { iri }
            | WebError::Io { iri, .. }
            | WebError::UnsupportedMediaType { iri, .. }
            | WebError::Parse { iri, .. } => Some(iri),
            WebError::FixtureMap { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Iterations,
    Triples,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::Iterations => f.write_str("iteration"),
            LimitKind::Triples => f.write_str("derived triple"),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    /// The closure hit a resource limit before reaching its fixpoint.
    #[error("closure incomplete: {limit} limit of {value} reached")]
    ClosureIncomplete {
        limit: LimitKind,
        value: usize,
        partial: Box<Formula>,
    },
    #[error("invalid engine limits: {0}")]
    InvalidLimits(String),
}

impl EngineError {
    pub fn partial(&self) -> Option<&Formula> {
        match self {
            EngineError::ClosureIncomplete { partial, .. } => Some(partial),
            _ => None,
        }
    }
}
