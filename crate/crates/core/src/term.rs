//! Terms, literals and triples.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::canon;
use crate::error::ModelError;
use crate::formula::Formula;
use crate::vocab;

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    /// Builds an IRI, rejecting strings without a scheme.
    pub fn new(value: impl AsRef<str>) -> Result<Self, ModelError> {
        let value = value.as_ref();
        if has_scheme(value) {
            Ok(Iri(Arc::from(value)))
        } else {
            Err(ModelError::RelativeIri(value.to_string()))
        }
    }

    /// Builds an IRI from a string already known to be absolute.
    pub fn new_unchecked(value: impl AsRef<str>) -> Self {
        debug_assert!(
            has_scheme(value.as_ref()),
            "not absolute: {}",
            value.as_ref()
        );
        Iri(Arc::from(value.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The IRI with any `#fragment` removed.
    pub fn without_fragment(&self) -> Iri {
        match self.0.find('#') {
            Some(pos) => Iri(Arc::from(&self.0[..pos])),
            None => self.clone(),
        }
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn has_scheme(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Language tag or datatype attached to a literal. The two are mutually
/// exclusive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Annotation {
    Plain,
    Lang(Arc<str>),
    Typed(Iri),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: Arc<str>,
    annotation: Annotation,
}

impl Literal {
    pub fn plain(lexical: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            annotation: Annotation::Plain,
        }
    }

    pub fn lang(lexical: impl AsRef<str>, tag: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            annotation: Annotation::Lang(Arc::from(tag.as_ref().to_ascii_lowercase().as_str())),
        }
    }

    /// A datatyped literal. `xsd:string` collapses to a plain literal.
    pub fn typed(lexical: impl AsRef<str>, datatype: Iri) -> Self {
        if datatype.as_str() == vocab::XSD_STRING {
            return Literal::plain(lexical);
        }
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            annotation: Annotation::Typed(datatype),
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), Iri::new_unchecked(vocab::XSD_INTEGER))
    }

    pub fn boolean(value: bool) -> Self {
        Literal::typed(
            if value { "true" } else { "false" },
            Iri::new_unchecked(vocab::XSD_BOOLEAN),
        )
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn annotation(&self) -> &Annotation {
        &self.annotation
    }

    pub fn datatype(&self) -> Option<&Iri> {
        match &self.annotation {
            Annotation::Typed(dt) => Some(dt),
            _ => None,
        }
    }

    pub fn language(&self) -> Option<&str> {
        match &self.annotation {
            Annotation::Lang(tag) => Some(tag),
            _ => None,
        }
    }

    /// True for plain and language-tagged literals.
    pub fn is_string(&self) -> bool {
        !matches!(self.annotation, Annotation::Typed(_))
    }

    pub fn has_datatype(&self, iri: &str) -> bool {
        self.datatype().is_some_and(|dt| dt.as_str() == iri)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.lexical.as_ref())?;
        match &self.annotation {
            Annotation::Plain => Ok(()),
            Annotation::Lang(tag) => write!(f, "@{tag}"),
            Annotation::Typed(dt) => write!(f, "^^{dt:?}"),
        }
    }
}

/// A formula used as a term. Construction canonicalizes the names that are
/// local to the formula (its blank nodes and the variables it declares), so
/// structural equality of quoted terms is equality up to renaming.
#[derive(Clone)]
pub struct QuotedFormula {
    formula: Arc<Formula>,
    free: Arc<[Term]>,
}

impl QuotedFormula {
    fn new(formula: Formula) -> Self {
        let free = formula
            .free_variables()
            .into_iter()
            .collect::<Vec<_>>()
            .into();
        QuotedFormula {
            formula: Arc::new(formula),
            free,
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// Variables occurring in the formula that it does not declare.
    pub fn free_variables(&self) -> &[Term] {
        &self.free
    }
}

impl PartialEq for QuotedFormula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.formula, &other.formula) || self.formula == other.formula
    }
}

impl Eq for QuotedFormula {}

impl PartialOrd for QuotedFormula {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuotedFormula {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.formula.cmp(&other.formula)
    }
}

impl std::hash::Hash for QuotedFormula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.formula.hash(state)
    }
}

impl Deref for QuotedFormula {
    type Target = Formula;

    fn deref(&self) -> &Formula {
        &self.formula
    }
}

impl fmt::Debug for QuotedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{:?}}}", self.formula)
    }
}

/// A node of an N3 graph.
///
/// The derived ordering compares the variant first and then the contents,
/// recursively; formulas store their triples in this order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
    Blank(Arc<str>),
    UniVar(Arc<str>),
    ExiVar(Arc<str>),
    List(Arc<[Term]>),
    Quoted(QuotedFormula),
}

impl Term {
    pub fn iri(value: impl AsRef<str>) -> Result<Term, ModelError> {
        Iri::new(value).map(Term::Iri)
    }

    pub(crate) fn iri_unchecked(value: impl AsRef<str>) -> Term {
        Term::Iri(Iri::new_unchecked(value))
    }

    pub fn blank(id: impl AsRef<str>) -> Term {
        Term::Blank(Arc::from(id.as_ref()))
    }

    pub fn universal(name: impl AsRef<str>) -> Term {
        Term::UniVar(Arc::from(name.as_ref()))
    }

    pub fn existential(name: impl AsRef<str>) -> Term {
        Term::ExiVar(Arc::from(name.as_ref()))
    }

    pub fn literal(lit: Literal) -> Term {
        Term::Literal(lit)
    }

    pub fn string(value: impl AsRef<str>) -> Term {
        Term::Literal(Literal::plain(value))
    }

    pub fn integer(value: i64) -> Term {
        Term::Literal(Literal::integer(value))
    }

    pub fn list(items: impl IntoIterator<Item = Term>) -> Term {
        Term::List(items.into_iter().collect::<Vec<_>>().into())
    }

    /// Quotes a formula, canonicalizing its local names.
    pub fn quoted(formula: Formula) -> Term {
        Term::Quoted(QuotedFormula::new(canon::canonicalize_local(formula)))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Term]> {
        match self {
            Term::List(items) => Some(items),
            Term::Iri(iri) if iri.as_str() == vocab::RDF_NIL => Some(&[]),
            _ => None,
        }
    }

    pub fn as_formula(&self) -> Option<&Formula> {
        match self {
            Term::Quoted(q) => Some(q.formula()),
            _ => None,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::UniVar(_) | Term::ExiVar(_))
    }

    /// Blank nodes and existential variables: both stand for "something".
    pub fn is_existential(&self) -> bool {
        matches!(self, Term::Blank(_) | Term::ExiVar(_))
    }

    /// True when the term contains no variables at any depth, ignoring
    /// variables that are declared inside nested quoted formulas.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::UniVar(_) | Term::ExiVar(_) => false,
            Term::List(items) => items.iter().all(Term::is_ground),
            Term::Quoted(q) => q.free_variables().is_empty(),
            _ => true,
        }
    }

    /// Visits every variable occurrence that is free at this level.
    pub fn for_each_free_var(&self, visit: &mut dyn FnMut(&Term)) {
        match self {
            Term::UniVar(_) | Term::ExiVar(_) => visit(self),
            Term::List(items) => items.iter().for_each(|t| t.for_each_free_var(visit)),
            Term::Quoted(q) => q.free_variables().iter().for_each(visit),
            _ => {}
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "{iri:?}"),
            Term::Literal(lit) => write!(f, "{lit:?}"),
            Term::Blank(id) => write!(f, "_:{id}"),
            Term::UniVar(name) => write!(f, "?{name}"),
            Term::ExiVar(name) => write!(f, "!{name}"),
            Term::List(items) => f.debug_list().entries(items.iter()).finish(),
            Term::Quoted(q) => write!(f, "{q:?}"),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }

    /// A triple whose predicate is a list is not a valid statement.
    pub fn is_well_formed(&self) -> bool {
        !matches!(self.predicate, Term::List(_))
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn map(&self, mut f: impl FnMut(&Term) -> Term) -> Triple {
        Triple::new(f(&self.subject), f(&self.predicate), f(&self.object))
    }

    pub fn has_predicate(&self, iri: &str) -> bool {
        matches!(&self.predicate, Term::Iri(p) if p.as_str() == iri)
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} {:?} {:?} .",
            self.subject, self.predicate, self.object
        )
    }
}

/// A substitution from variables (universal, existential, or blank nodes used
/// as pattern variables) to terms.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bindings(BTreeMap<Term, Term>);

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn get(&self, var: &Term) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn contains(&self, var: &Term) -> bool {
        self.0.contains_key(var)
    }

    /// Binds `var` to `value`. Binding a variable to itself is a no-op.
    pub fn insert(&mut self, var: Term, value: Term) {
        if var != value {
            self.0.insert(var, value);
        }
    }

    pub fn remove(&mut self, var: &Term) -> Option<Term> {
        self.0.remove(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Term)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Term> {
        self.0.keys()
    }

    /// The value of `term` if it is a bound variable, else `term` itself.
    pub fn resolve<'a>(&'a self, term: &'a Term) -> &'a Term {
        self.0.get(term).unwrap_or(term)
    }

    /// Restricts the bindings to the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Term>) -> Bindings {
        let mut out = Bindings::new();
        for v in vars {
            if let Some(value) = self.0.get(v) {
                out.0.insert(v.clone(), value.clone());
            }
        }
        out
    }

    /// Composition: applies `self` then `other`.
    pub fn compose(&self, other: &Bindings) -> Bindings {
        let mut out = Bindings::new();
        for (k, v) in &self.0 {
            out.insert(k.clone(), crate::formula::substitute_term(v, other));
        }
        for (k, v) in &other.0 {
            if !out.0.contains_key(k) {
                out.insert(k.clone(), v.clone());
            }
        }
        out
    }
}

impl fmt::Debug for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl FromIterator<(Term, Term)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (Term, Term)>>(iter: I) -> Self {
        let mut b = Bindings::new();
        for (k, v) in iter {
            b.insert(k, v);
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_requires_scheme() {
        assert!(Iri::new("http://example.org/").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("foo/bar").is_err());
        assert!(Iri::new("").is_err());
    }

    #[test]
    fn xsd_string_is_plain() {
        let lit = Literal::typed("x", Iri::new_unchecked(vocab::XSD_STRING));
        assert_eq!(lit, Literal::plain("x"));
    }

    #[test]
    fn bindings_ignore_self_maps() {
        let mut b = Bindings::new();
        b.insert(Term::universal("X"), Term::universal("X"));
        assert!(b.is_empty());
    }

    #[test]
    fn ordering_is_by_kind_first() {
        let iri = Term::iri_unchecked("http://z.example/");
        let lit = Term::string("a");
        assert!(iri < lit);
        assert!(Term::blank("z") < Term::universal("a"));
    }
}
