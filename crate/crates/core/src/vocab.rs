//! Namespace IRIs used throughout the reasoner.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

pub const LOG: &str = "http://www.w3.org/2000/10/swap/log#";
pub const MATH: &str = "http://www.w3.org/2000/10/swap/math#";
pub const STRING: &str = "http://www.w3.org/2000/10/swap/string#";
pub const LIST: &str = "http://www.w3.org/2000/10/swap/list#";
pub const TIME: &str = "http://www.w3.org/2000/10/swap/time#";
pub const OS: &str = "http://www.w3.org/2000/10/swap/os#";
pub const CRYPTO: &str = "http://www.w3.org/2000/10/swap/crypto#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
pub const LOG_IMPLIES: &str = "http://www.w3.org/2000/10/swap/log#implies";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";

/// Namespaces whose predicates the reasoner may evaluate by calculation.
pub const BUILTIN_NAMESPACES: [&str; 7] = [LOG, MATH, STRING, LIST, TIME, OS, CRYPTO];

/// Well-known prefixes, used by the serializer when no prefix map is given
/// and by the CLI for `--prefixes` defaults.
pub const STANDARD_PREFIXES: [(&str, &str); 11] = [
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("xsd", XSD),
    ("owl", OWL),
    ("log", LOG),
    ("math", MATH),
    ("string", STRING),
    ("list", LIST),
    ("time", TIME),
    ("os", OS),
    ("crypto", CRYPTO),
];

pub fn is_builtin_namespace(iri: &str) -> bool {
    BUILTIN_NAMESPACES.iter().any(|ns| iri.starts_with(ns))
}
