//! Bundled rule sets: RDFS domain/range/subclass rules, list axioms and
//! `owl:sameAs` equality rules.

use crate::formula::Formula;
use crate::parser::parse_document;

pub const RDFS_IRI: &str = "urn:n3r:rdfs";
pub const LISTS_IRI: &str = "urn:n3r:lists";
pub const SAMEAS_IRI: &str = "urn:n3r:sameas";

const RDFS: &str = include_str!("../axioms/rdfs.n3");
const LISTS: &str = include_str!("../axioms/lists.n3");
const SAMEAS: &str = include_str!("../axioms/sameas.n3");

/// Source text of a bundled rule set.
pub fn text(iri: &str) -> Option<&'static str> {
    match iri {
        RDFS_IRI => Some(RDFS),
        LISTS_IRI => Some(LISTS),
        SAMEAS_IRI => Some(SAMEAS),
        _ => None,
    }
}

fn load(iri: &str) -> Formula {
    let text = text(iri).expect("bundled rule set");
    parse_document(text, iri).expect("bundled rule sets parse")
}

pub fn rdfs() -> Formula {
    load(RDFS_IRI)
}

pub fn lists() -> Formula {
    load(LISTS_IRI)
}

pub fn sameas() -> Formula {
    load(SAMEAS_IRI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::extract_rules;

    #[test]
    fn bundled_rules_parse_and_fire() {
        for (f, n) in [(rdfs(), 6), (lists(), 3), (sameas(), 5)] {
            let (rules, diagnostics) = extract_rules(&f);
            assert_eq!(rules.len(), n);
            assert!(diagnostics.is_empty());
        }
    }
}
