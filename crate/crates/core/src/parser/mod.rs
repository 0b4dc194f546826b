//! Recursive-descent parser for N3 documents.
//!
//! All syntactic sugar is expanded while parsing: `a`, `=`, `=>`, `<=`,
//! `is ... of`, `[ ... ]`, `( ... )`, `;` and `,` repetition, `<>`, and
//! implicit quantification of `?x` variables in the enclosing formula.

mod lexer;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

pub use lexer::{tokenize, Token, TokenKind};

use crate::error::{ParseError, ParseErrorKind, SourceSpan};
use crate::formula::{fresh_name, Formula};
use crate::term::{Iri, Literal, Term, Triple};
use crate::vocab;

/// Parses a complete document. `base` is the document's IRI; `<>` and
/// relative references resolve against it.
pub fn parse_document(text: &str, base: &str) -> Result<Formula, ParseError> {
    Parser::new(text, Some(base))?.parse()
}

/// Parses a document that has no retrieval IRI; relative references are an
/// error unless the document sets `@base`.
pub fn parse_document_without_base(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, None)?.parse()
}

/// Resolves `reference` against the absolute IRI `base`.
pub fn resolve_iri(base: &str, reference: &str) -> Result<String, String> {
    let base = oxiri::Iri::parse(base).map_err(|e| format!("invalid base IRI <{base}>: {e}"))?;
    let reference =
        oxiri::IriRef::parse(reference).map_err(|e| format!("invalid IRI <{reference}>: {e}"))?;
    base.resolve(&reference)
        .map(|i| i.into_inner())
        .map_err(|e| e.to_string())
}

/// Prefixes, base and keyword mode in effect at some point of a document.
#[derive(Debug, Clone, Default)]
pub struct ParserState {
    pub prefixes: BTreeMap<String, String>,
    pub base: Option<String>,
    /// `None` is the default mode, in which only `a`, `is` and `of` are bare
    /// keywords.
    pub keywords: Option<BTreeSet<String>>,
}

impl ParserState {
    /// Expands `prefix:local`. An undeclared empty prefix stands for the
    /// document's own namespace, `<#>`.
    pub fn resolve_qname(&self, qname: &str) -> Result<Term, ParseError> {
        let span = SourceSpan::default();
        let (prefix, local) = qname.split_once(':').unwrap_or(("", qname));
        let iri = self.expand(prefix, local, span)?;
        Ok(Term::Iri(iri))
    }

    fn expand(&self, prefix: &str, local: &str, span: SourceSpan) -> Result<Iri, ParseError> {
        if let Some(ns) = self.prefixes.get(prefix) {
            return Iri::new(format!("{ns}{local}"))
                .map_err(|e| ParseError::new(ParseErrorKind::Syntax, span, e.to_string()));
        }
        if prefix.is_empty() {
            let ns = self.resolve_iri("#", span)?;
            return Ok(Iri::new_unchecked(format!("{ns}{local}")));
        }
        Err(ParseError::new(
            ParseErrorKind::UnknownPrefix(prefix.to_string()),
            span,
            format!("undeclared prefix '{prefix}:'"),
        ))
    }

    fn resolve_iri(&self, reference: &str, span: SourceSpan) -> Result<Iri, ParseError> {
        if let Ok(iri) = oxiri::Iri::parse(reference) {
            return Ok(Iri::new_unchecked(iri.as_str()));
        }
        let Some(base) = &self.base else {
            return Err(ParseError::new(
                ParseErrorKind::RelativeIriWithoutBase(reference.to_string()),
                span,
                format!("relative IRI <{reference}> with no base"),
            ));
        };
        let base = oxiri::Iri::parse(base.as_str()).map_err(|e| {
            ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("invalid base IRI: {e}"),
            )
        })?;
        let resolved = base
            .resolve(&oxiri::IriRef::parse(reference).map_err(|e| {
                ParseError::new(
                    ParseErrorKind::Syntax,
                    span,
                    format!("invalid IRI <{reference}>: {e}"),
                )
            })?)
            .map_err(|e| {
                ParseError::new(
                    ParseErrorKind::Syntax,
                    span,
                    format!("invalid IRI <{reference}>: {e}"),
                )
            })?;
        Ok(Iri::new_unchecked(resolved.as_str()))
    }

    fn is_keyword(&self, word: &str) -> bool {
        match &self.keywords {
            None => matches!(word, "a" | "is" | "of"),
            Some(set) => set.contains(word),
        }
    }
}

/// Declarations of one formula nesting level.
#[derive(Default)]
struct Scope {
    formula: Formula,
    /// `?x` variables keyed by "?x", declared IRIs keyed by the IRI.
    universals: HashMap<String, Arc<str>>,
    existentials: HashMap<String, Arc<str>>,
    blank_labels: HashMap<String, Term>,
}

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    state: ParserState,
    scopes: Vec<Scope>,
    used_names: BTreeSet<String>,
    blank_prefix: String,
    blank_counter: usize,
    eof_span: SourceSpan,
}

enum Verb {
    Forward(Term),
    Backward(Term),
}

impl Parser {
    pub fn new(text: &str, base: Option<&str>) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let lines = text.split('\n').count();
        let last_line = text.rsplit('\n').next().unwrap_or("");
        let eof_span = SourceSpan {
            start: text.len(),
            end: text.len(),
            line: lines,
            column: last_line.chars().count() + 1,
        };
        let state = ParserState {
            base: base.map(str::to_string),
            ..ParserState::default()
        };
        Ok(Parser {
            tokens,
            pos: 0,
            state,
            scopes: vec![Scope::default()],
            used_names: BTreeSet::new(),
            blank_prefix: "b".to_string(),
            blank_counter: 0,
            eof_span,
        })
    }

    /// Sets the prefix of generated blank node ids (default `b`).
    pub fn with_blank_prefix(mut self, prefix: &str) -> Self {
        self.blank_prefix = prefix.to_string();
        self
    }

    pub fn state(&self) -> &ParserState {
        &self.state
    }

    pub fn parse(self) -> Result<Formula, ParseError> {
        self.parse_with_state().map(|(f, _)| f)
    }

    /// Parses and also returns the final prefix/base/keyword state.
    pub fn parse_with_state(mut self) -> Result<(Formula, ParserState), ParseError> {
        self.formula_body(false)?;
        let scope = self.scopes.pop().expect("top scope");
        Ok((close_scope(scope), self.state))
    }

    // -- token helpers

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn span(&self) -> SourceSpan {
        self.tokens
            .get(self.pos)
            .map(|t| t.span)
            .unwrap_or(self.eof_span)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(ParseErrorKind::Syntax, self.span(), message)
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}, found {}", self.describe())))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(k) => format!("{k:?}"),
        }
    }

    /// True if the next token is the given keyword, spelled `@word` or, when
    /// the keyword mode allows it, bare.
    fn at_keyword(&self, word: &str) -> bool {
        match self.peek() {
            Some(TokenKind::AtWord(w)) => w == word,
            Some(TokenKind::BareWord(w)) => w == word && self.state.is_keyword(word),
            _ => false,
        }
    }

    // -- grammar

    fn formula_body(&mut self, nested: bool) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                None if nested => return Err(self.syntax("unterminated formula: expected '}'")),
                None => return Ok(()),
                Some(TokenKind::RBrace) if nested => return Ok(()),
                Some(TokenKind::RBrace) => return Err(self.syntax("unexpected '}'")),
                Some(TokenKind::Dot) => {
                    self.pos += 1;
                    continue;
                }
                _ => {}
            }
            if !self.directive()? {
                self.statement()?;
            }
            // The final statement of a formula (or document) may omit its dot.
            if !self.eat(&TokenKind::Dot) {
                match self.peek() {
                    Some(TokenKind::RBrace) if nested => {}
                    None => {}
                    _ => {
                        return Err(self.syntax(format!("expected '.', found {}", self.describe())))
                    }
                }
            }
        }
    }

    fn directive(&mut self) -> Result<bool, ParseError> {
        if self.at_keyword("prefix") {
            self.pos += 1;
            let span = self.span();
            let prefix = match self.next().map(|t| t.kind) {
                Some(TokenKind::PrefixedName { prefix, local }) if local.is_empty() => prefix,
                _ => {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        span,
                        "expected a prefix like 'ex:'",
                    ))
                }
            };
            let span = self.span();
            let ns = match self.next().map(|t| t.kind) {
                Some(TokenKind::IriRef(iri)) => self.state.resolve_iri(&iri, span)?,
                _ => {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        span,
                        "expected a namespace IRI",
                    ))
                }
            };
            self.state.prefixes.insert(prefix, ns.as_str().to_string());
            return Ok(true);
        }
        if self.at_keyword("base") {
            self.pos += 1;
            let span = self.span();
            let base = match self.next().map(|t| t.kind) {
                Some(TokenKind::IriRef(iri)) => self.state.resolve_iri(&iri, span)?,
                _ => {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        span,
                        "expected a base IRI",
                    ))
                }
            };
            self.state.base = Some(base.as_str().to_string());
            return Ok(true);
        }
        if matches!(self.peek(), Some(TokenKind::AtWord(w)) if w == "keywords") {
            self.pos += 1;
            let mut set = BTreeSet::new();
            while let Some(TokenKind::BareWord(w)) = self.peek() {
                set.insert(w.clone());
                self.pos += 1;
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.state.keywords = Some(set);
            return Ok(true);
        }
        for (word, universal) in [("forAll", true), ("forSome", false)] {
            if self.at_keyword(word) {
                self.pos += 1;
                loop {
                    let span = self.span();
                    let iri = match self.next().map(|t| t.kind) {
                        Some(TokenKind::IriRef(iri)) => self.state.resolve_iri(&iri, span)?,
                        Some(TokenKind::PrefixedName { prefix, local }) => {
                            self.state.expand(&prefix, &local, span)?
                        }
                        Some(TokenKind::BareWord(w)) if !self.state.is_keyword(&w) => {
                            self.state.expand("", &w, span)?
                        }
                        _ => {
                            return Err(ParseError::new(
                                ParseErrorKind::Syntax,
                                span,
                                "expected a name to quantify",
                            ))
                        }
                    };
                    self.declare(iri, universal);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn declare(&mut self, iri: Iri, universal: bool) {
        let base = local_name(iri.as_str());
        let name: Arc<str> = Arc::from(self.allocate_name(base).as_str());
        let scope = self.scopes.last_mut().expect("scope");
        let key = iri.as_str().to_string();
        if universal {
            scope.existentials.remove(&key);
            scope.universals.insert(key, name);
        } else {
            scope.universals.remove(&key);
            scope.existentials.insert(key, name);
        }
    }

    fn allocate_name(&mut self, base: &str) -> String {
        let base = if base.is_empty() { "v" } else { base };
        let name = fresh_name(base, |c| self.used_names.contains(c));
        self.used_names.insert(name.clone());
        name
    }

    fn fresh_blank(&mut self) -> Term {
        let id = format!("{}{}", self.blank_prefix, self.blank_counter);
        self.blank_counter += 1;
        Term::blank(id)
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let subject = self.term()?;
        if matches!(
            self.peek(),
            Some(TokenKind::Dot) | Some(TokenKind::RBrace) | None
        ) {
            return Ok(());
        }
        self.property_list(&subject)
    }

    fn property_list(&mut self, subject: &Term) -> Result<(), ParseError> {
        loop {
            let verb_span = self.span();
            let verb = self.verb()?;
            let predicate = match &verb {
                Verb::Forward(p) | Verb::Backward(p) => p,
            };
            if matches!(predicate, Term::List(_)) {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    verb_span,
                    "a list cannot be a predicate",
                ));
            }
            loop {
                let object = self.term()?;
                let triple = match &verb {
                    Verb::Forward(p) => Triple::new(subject.clone(), p.clone(), object),
                    Verb::Backward(p) => Triple::new(object, p.clone(), subject.clone()),
                };
                self.scopes
                    .last_mut()
                    .expect("scope")
                    .formula
                    .insert(triple);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            if !self.eat(&TokenKind::Semicolon) {
                return Ok(());
            }
            while self.eat(&TokenKind::Semicolon) {}
            if matches!(
                self.peek(),
                Some(TokenKind::Dot) | Some(TokenKind::RBrace) | Some(TokenKind::RBracket) | None
            ) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Verb, ParseError> {
        match self.peek() {
            Some(TokenKind::Equals) => {
                self.pos += 1;
                return Ok(Verb::Forward(Term::iri_unchecked(vocab::OWL_SAME_AS)));
            }
            Some(TokenKind::Implies) => {
                self.pos += 1;
                return Ok(Verb::Forward(Term::iri_unchecked(vocab::LOG_IMPLIES)));
            }
            Some(TokenKind::ImpliedBy) => {
                self.pos += 1;
                return Ok(Verb::Backward(Term::iri_unchecked(vocab::LOG_IMPLIES)));
            }
            _ => {}
        }
        if self.at_keyword("a") {
            self.pos += 1;
            return Ok(Verb::Forward(Term::iri_unchecked(vocab::RDF_TYPE)));
        }
        if self.at_keyword("has") {
            self.pos += 1;
            return Ok(Verb::Forward(self.term()?));
        }
        if self.at_keyword("is") {
            self.pos += 1;
            let predicate = self.term()?;
            if !self.at_keyword("of") {
                return Err(self.syntax(format!(
                    "expected 'of' after 'is ...', found {}",
                    self.describe()
                )));
            }
            self.pos += 1;
            return Ok(Verb::Backward(predicate));
        }
        Ok(Verb::Forward(self.term()?))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        let Some(token) = self.next() else {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                "expected a term, found end of input",
            ));
        };
        match token.kind {
            TokenKind::IriRef(reference) => {
                let iri = self.state.resolve_iri(&reference, span)?;
                Ok(self.lookup_declared(iri))
            }
            TokenKind::PrefixedName { prefix, local } => {
                let iri = self.state.expand(&prefix, &local, span)?;
                Ok(self.lookup_declared(iri))
            }
            TokenKind::BareWord(word) => {
                if self.state.is_keyword(&word) {
                    return match word.as_str() {
                        "true" => Ok(Term::Literal(Literal::boolean(true))),
                        "false" => Ok(Term::Literal(Literal::boolean(false))),
                        _ => Err(ParseError::new(
                            ParseErrorKind::Syntax,
                            span,
                            format!("keyword '{word}' cannot be used as a term"),
                        )),
                    };
                }
                let iri = self.state.expand("", &word, span)?;
                Ok(self.lookup_declared(iri))
            }
            TokenKind::AtWord(word) => match word.as_str() {
                "true" => Ok(Term::Literal(Literal::boolean(true))),
                "false" => Ok(Term::Literal(Literal::boolean(false))),
                _ => Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    span,
                    format!("unexpected '@{word}'"),
                )),
            },
            TokenKind::Variable(name) => Ok(self.variable(&name)),
            TokenKind::BlankLabel(label) => {
                let existing = self
                    .scopes
                    .last()
                    .expect("scope")
                    .blank_labels
                    .get(&label)
                    .cloned();
                Ok(match existing {
                    Some(t) => t,
                    None => {
                        let t = self.fresh_blank();
                        self.scopes
                            .last_mut()
                            .expect("scope")
                            .blank_labels
                            .insert(label, t.clone());
                        t
                    }
                })
            }
            TokenKind::String { value, .. } => self.literal_suffix(value, token.span),
            TokenKind::Integer(lex) => Ok(Term::Literal(Literal::typed(
                normalize_sign(&lex),
                Iri::new_unchecked(vocab::XSD_INTEGER),
            ))),
            TokenKind::Decimal(lex) => Ok(Term::Literal(Literal::typed(
                normalize_sign(&lex),
                Iri::new_unchecked(vocab::XSD_DECIMAL),
            ))),
            TokenKind::Double(lex) => Ok(Term::Literal(Literal::typed(
                normalize_sign(&lex),
                Iri::new_unchecked(vocab::XSD_DOUBLE),
            ))),
            TokenKind::LBracket => {
                let node = self.fresh_blank();
                if self.eat(&TokenKind::RBracket) {
                    return Ok(node);
                }
                self.property_list(&node)?;
                self.expect(TokenKind::RBracket, "']'")?;
                Ok(node)
            }
            TokenKind::LParen => {
                let mut items = Vec::new();
                while !self.eat(&TokenKind::RParen) {
                    if self.peek().is_none() {
                        return Err(self.syntax("unterminated list: expected ')'"));
                    }
                    items.push(self.term()?);
                }
                Ok(Term::list(items))
            }
            TokenKind::LBrace => {
                self.scopes.push(Scope::default());
                self.formula_body(true)?;
                self.expect(TokenKind::RBrace, "'}'")?;
                let scope = self.scopes.pop().expect("nested scope");
                Ok(Term::quoted(close_scope(scope)))
            }
            other => Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("expected a term, found {other:?}"),
            )),
        }
    }

    fn literal_suffix(
        &mut self,
        value: String,
        string_span: SourceSpan,
    ) -> Result<Term, ParseError> {
        match self.tokens.get(self.pos) {
            Some(Token {
                kind: TokenKind::AtWord(tag),
                span,
            }) if span.start == string_span.end => {
                let tag = tag.clone();
                self.pos += 1;
                Ok(Term::Literal(Literal::lang(value, tag)))
            }
            Some(Token {
                kind: TokenKind::DoubleCaret,
                ..
            }) => {
                self.pos += 1;
                let span = self.span();
                let datatype = match self.term()? {
                    Term::Iri(iri) => iri,
                    _ => {
                        return Err(ParseError::new(
                            ParseErrorKind::Syntax,
                            span,
                            "datatype must be an IRI",
                        ))
                    }
                };
                Ok(Term::Literal(Literal::typed(value, datatype)))
            }
            _ => Ok(Term::Literal(Literal::plain(value))),
        }
    }

    /// Maps an IRI to the variable it names if some enclosing formula
    /// quantifies it.
    fn lookup_declared(&self, iri: Iri) -> Term {
        for scope in self.scopes.iter().rev() {
            if let Some(name) = scope.universals.get(iri.as_str()) {
                return Term::UniVar(name.clone());
            }
            if let Some(name) = scope.existentials.get(iri.as_str()) {
                return Term::ExiVar(name.clone());
            }
        }
        Term::Iri(iri)
    }

    /// `?x` refers to an enclosing declaration, or else is universally
    /// quantified in the parent of the current formula.
    fn variable(&mut self, name: &str) -> Term {
        let key = format!("?{name}");
        for scope in self.scopes.iter().rev() {
            if let Some(var) = scope.universals.get(&key) {
                return Term::UniVar(var.clone());
            }
        }
        let allocated: Arc<str> = Arc::from(self.allocate_name(name).as_str());
        let target = self.scopes.len().saturating_sub(2);
        self.scopes[target]
            .universals
            .insert(key, allocated.clone());
        Term::UniVar(allocated)
    }
}

fn close_scope(scope: Scope) -> Formula {
    let mut formula = scope.formula;
    for name in scope.universals.values() {
        formula.declare_universal(name);
    }
    for name in scope.existentials.values() {
        formula.declare_existential(name);
    }
    formula
}

fn normalize_sign(lexical: &str) -> &str {
    lexical.strip_prefix('+').unwrap_or(lexical)
}

/// The part of an IRI after its last `#`, `/` or `:`, used to name variables.
fn local_name(iri: &str) -> &str {
    let cut = iri.rfind(['#', '/', ':']).map(|p| p + 1).unwrap_or(0);
    let name = &iri[cut..];
    if name
        .chars()
        .all(|c| c.is_alphanumeric() || c == '_' || c == '-')
        && !name.is_empty()
    {
        name
    } else {
        "v"
    }
}
