//! Notation3 data model, parser, serializer and forward-chaining reasoner.

pub mod axioms;
pub mod builtins;
pub mod canon;
pub mod engine;
pub mod error;
pub mod formula;
pub mod parser;
pub mod serializer;
pub mod term;
pub mod vocab;
pub mod web;

pub use builtins::{EvalContext, EvalOutcome, Registry};
pub use canon::{canonicalize, isomorphic};
pub use engine::{
    apply_rule, conclusion, conclusion_with, extract_rules, filter, filter_with, includes,
    includes_witness, not_includes, supports, supports_with, EngineLimits, FiringRecord, Rule,
};
pub use error::{
    EngineError, LimitKind, ModelError, ParseError, ParseErrorKind, SourceSpan, WebError,
};
pub use formula::{conjoin, substitute_term, substitute_triple, substitute_variables, Formula};
pub use parser::{parse_document, parse_document_without_base, ParserState};
pub use serializer::{canonical_text, canonical_text_with_prefixes, serialize, SerializerConfig};
pub use term::{Annotation, Bindings, Iri, Literal, QuotedFormula, Term, Triple};
pub use web::{Document, Resolver, ResolverConfig};
