//! Formulas and the structural operations the reasoner is built from:
//! substitution, equality rewriting, renaming apart and conjunction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::term::{Bindings, Term, Triple};

/// A conjunctive set of triples together with the variables it quantifies.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Formula {
    triples: BTreeSet<Triple>,
    universals: BTreeSet<Arc<str>>,
    existentials: BTreeSet<Arc<str>>,
}

impl Formula {
    pub fn new() -> Self {
        Formula::default()
    }

    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        Formula {
            triples: triples.into_iter().collect(),
            ..Formula::default()
        }
    }

    /// Adds a triple; returns false if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> impl DoubleEndedIterator<Item = &Triple> + ExactSizeIterator {
        self.triples.iter()
    }

    pub fn triple_set(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn retain(&mut self, keep: impl FnMut(&Triple) -> bool) {
        self.triples.retain(keep)
    }

    pub fn universals(&self) -> &BTreeSet<Arc<str>> {
        &self.universals
    }

    pub fn existentials(&self) -> &BTreeSet<Arc<str>> {
        &self.existentials
    }

    pub fn declare_universal(&mut self, name: impl AsRef<str>) {
        let name: Arc<str> = Arc::from(name.as_ref());
        self.existentials.remove(&name);
        self.universals.insert(name);
    }

    pub fn declare_existential(&mut self, name: impl AsRef<str>) {
        let name: Arc<str> = Arc::from(name.as_ref());
        if !self.universals.contains(&name) {
            self.existentials.insert(name);
        }
    }

    pub fn clear_declarations(&mut self) {
        self.universals.clear();
        self.existentials.clear();
    }

    /// Declared variables as terms: universals first, then existentials.
    pub fn declared_variables(&self) -> Vec<Term> {
        self.universals
            .iter()
            .map(|n| Term::UniVar(n.clone()))
            .chain(self.existentials.iter().map(|n| Term::ExiVar(n.clone())))
            .collect()
    }

    pub fn declares(&self, var: &Term) -> bool {
        match var {
            Term::UniVar(n) => self.universals.contains(n),
            Term::ExiVar(n) => self.existentials.contains(n),
            _ => false,
        }
    }

    /// Variables occurring in the formula (at any depth) that are not
    /// declared by it or by the nested formula they occur in.
    pub fn free_variables(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            for term in t.terms() {
                term.for_each_free_var(&mut |v| {
                    if !self.declares(v) {
                        out.insert(v.clone());
                    }
                });
            }
        }
        out
    }

    /// Blank nodes of this formula's own level (including inside lists, but
    /// not inside quoted formulas, whose blank nodes are local to them).
    pub fn blank_nodes(&self) -> BTreeSet<Term> {
        fn walk(t: &Term, out: &mut BTreeSet<Term>) {
            match t {
                Term::Blank(_) => {
                    out.insert(t.clone());
                }
                Term::List(items) => items.iter().for_each(|i| walk(i, out)),
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        for t in &self.triples {
            for term in t.terms() {
                walk(term, &mut out);
            }
        }
        out
    }

    /// Every name this formula uses for blank nodes or variables at its own
    /// level, including free variables of nested formulas.
    pub fn names_in_use(&self) -> BTreeSet<Arc<str>> {
        let mut out: BTreeSet<Arc<str>> = BTreeSet::new();
        out.extend(self.universals.iter().cloned());
        out.extend(self.existentials.iter().cloned());
        for t in self.blank_nodes().into_iter().chain(self.free_variables()) {
            if let Term::Blank(n) | Term::UniVar(n) | Term::ExiVar(n) = t {
                out.insert(n);
            }
        }
        out
    }

    /// True if neither variables nor blank nodes occur at this level.
    pub fn is_ground(&self) -> bool {
        self.universals.is_empty()
            && self.existentials.is_empty()
            && self.free_variables().is_empty()
            && self.blank_nodes().is_empty()
    }

    pub(crate) fn with_triples(&self, triples: BTreeSet<Triple>) -> Formula {
        Formula {
            triples,
            universals: self.universals.clone(),
            existentials: self.existentials.clone(),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.universals.is_empty() {
            write!(f, "@forAll {:?}. ", self.universals)?;
        }
        if !self.existentials.is_empty() {
            write!(f, "@forSome {:?}. ", self.existentials)?;
        }
        for t in &self.triples {
            write!(f, "{t:?} ")?;
        }
        Ok(())
    }
}

impl Extend<Triple> for Formula {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}

impl FromIterator<Triple> for Formula {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Formula::from_triples(iter)
    }
}

/// Applies bindings to a term. Inside a quoted formula, variables the formula
/// declares itself are shadowed and its blank nodes are local, so neither is
/// replaced there.
pub fn substitute_term(term: &Term, b: &Bindings) -> Term {
    if b.is_empty() {
        return term.clone();
    }
    match term {
        Term::UniVar(_) | Term::ExiVar(_) | Term::Blank(_) => {
            b.get(term).cloned().unwrap_or_else(|| term.clone())
        }
        Term::List(items) => {
            if items
                .iter()
                .all(|t| t.is_ground() && !matches!(t, Term::Blank(_) | Term::List(_)))
            {
                return term.clone();
            }
            Term::list(items.iter().map(|t| substitute_term(t, b)))
        }
        Term::Quoted(q) => {
            let inner: Bindings = q
                .free_variables()
                .iter()
                .filter_map(|v| b.get(v).map(|value| (v.clone(), value.clone())))
                .collect();
            if inner.is_empty() {
                return term.clone();
            }
            let mut formula = q.formula().clone();
            // Rename the quoted formula's own variables out of the way of any
            // free variables the substituted values bring in.
            let incoming: BTreeSet<Arc<str>> = inner
                .iter()
                .flat_map(|(_, v)| {
                    let mut names = Vec::new();
                    v.for_each_free_var(&mut |t| {
                        if let Term::UniVar(n) | Term::ExiVar(n) = t {
                            names.push(n.clone());
                        }
                    });
                    names
                })
                .collect();
            if formula
                .universals()
                .iter()
                .chain(formula.existentials())
                .any(|n| incoming.contains(n))
            {
                let mut reserved = incoming.clone();
                reserved.extend(inner.keys().filter_map(|k| match k {
                    Term::UniVar(n) | Term::ExiVar(n) => Some(n.clone()),
                    _ => None,
                }));
                formula = rename_declared_apart(&formula, &reserved);
            }
            let triples = formula
                .triples()
                .map(|t| t.map(|x| substitute_term(x, &inner)))
                .collect();
            Term::quoted(formula.with_triples(triples))
        }
        Term::Iri(_) | Term::Literal(_) => term.clone(),
    }
}

pub fn substitute_triple(triple: &Triple, b: &Bindings) -> Triple {
    triple.map(|t| substitute_term(t, b))
}

/// Replaces every bound variable (including inside nested formulas and
/// lists) and drops the declarations of the variables that were bound.
pub fn substitute_variables(f: &Formula, b: &Bindings) -> Formula {
    let mut out = Formula::new();
    for t in f.triples() {
        out.insert(substitute_triple(t, b));
    }
    for n in f.universals() {
        if !b.contains(&Term::UniVar(n.clone())) {
            out.declare_universal(n);
        }
    }
    for n in f.existentials() {
        if !b.contains(&Term::ExiVar(n.clone())) {
            out.declare_existential(n);
        }
    }
    out
}

/// Replaces `from` by `to` at the top level of the formula only. Quoted
/// formulas are referentially opaque and are left untouched.
pub fn rewrite_equals(f: &Formula, from: &Term, to: &Term) -> Formula {
    fn rewrite(t: &Term, from: &Term, to: &Term) -> Term {
        if t == from {
            return to.clone();
        }
        match t {
            Term::List(items) => Term::list(items.iter().map(|i| rewrite(i, from, to))),
            _ => t.clone(),
        }
    }
    let triples = f
        .triples()
        .map(|t| t.map(|x| rewrite(x, from, to)))
        .collect();
    f.with_triples(triples)
}

/// Picks a name derived from `base` that `taken` rejects.
pub(crate) fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    let sep = if base.ends_with(|c: char| c.is_ascii_digit()) {
        "_"
    } else {
        ""
    };
    (1..)
        .map(|n| format!("{base}{sep}{n}"))
        .find(|cand| !taken(cand))
        .expect("unbounded")
}

/// Renames terms (variables or blank nodes) according to `map`, keeping
/// declarations in step with the renaming.
pub(crate) fn rename(f: &Formula, map: &BTreeMap<Term, Term>) -> Formula {
    let b: Bindings = map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut out = Formula::new();
    for t in f.triples() {
        out.insert(substitute_triple(t, &b));
    }
    for n in f.universals() {
        match map.get(&Term::UniVar(n.clone())) {
            Some(Term::UniVar(m)) => out.declare_universal(m),
            Some(_) => {}
            None => out.declare_universal(n),
        }
    }
    for n in f.existentials() {
        match map.get(&Term::ExiVar(n.clone())) {
            Some(Term::ExiVar(m)) => out.declare_existential(m),
            Some(_) => {}
            None => out.declare_existential(n),
        }
    }
    out
}

fn rename_declared_apart(f: &Formula, reserved: &BTreeSet<Arc<str>>) -> Formula {
    let used = f.names_in_use();
    let mut map = BTreeMap::new();
    let mut taken: BTreeSet<String> = used.iter().chain(reserved).map(|n| n.to_string()).collect();
    for var in f.declared_variables() {
        let (Term::UniVar(n) | Term::ExiVar(n)) = &var else {
            continue;
        };
        if reserved.contains(n) {
            let fresh = fresh_name(n, |c| taken.contains(c));
            taken.insert(fresh.clone());
            let new = match var {
                Term::UniVar(_) => Term::universal(&fresh),
                _ => Term::existential(&fresh),
            };
            map.insert(var.clone(), new);
        }
    }
    rename(f, &map)
}

/// Renames blank nodes and variables of `f` whose names collide with
/// `reserved`. The result is isomorphic to `f`.
pub fn rename_apart(f: &Formula, reserved: &BTreeSet<String>) -> Formula {
    let mut taken: BTreeSet<String> = f.names_in_use().iter().map(|n| n.to_string()).collect();
    taken.extend(reserved.iter().cloned());
    let mut candidates: BTreeSet<Term> = f.blank_nodes();
    candidates.extend(f.declared_variables());
    candidates.extend(f.free_variables());
    let mut map = BTreeMap::new();
    for t in candidates {
        let (Term::Blank(n) | Term::UniVar(n) | Term::ExiVar(n)) = &t else {
            continue;
        };
        if reserved.contains(n.as_ref()) {
            let fresh = fresh_name(n, |c| taken.contains(c));
            taken.insert(fresh.clone());
            let new = match &t {
                Term::Blank(_) => Term::blank(&fresh),
                Term::UniVar(_) => Term::universal(&fresh),
                _ => Term::existential(&fresh),
            };
            map.insert(t.clone(), new);
        }
    }
    rename(f, &map)
}

/// Conjunction of formulas. Blank nodes and existentials of each input are
/// renamed apart so they never merge; universals are merged by name.
pub fn conjoin<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Formula {
    let mut acc = Formula::new();
    let mut existential_names: BTreeSet<String> = BTreeSet::new();
    for f in fs {
        let mut reserved = existential_names.clone();
        // An existential of `f` must not reuse a universal already merged, and
        // a universal of `f` must not reuse an existential.
        reserved.extend(acc.universals().iter().map(|n| n.to_string()));
        let mut keep_universals: BTreeSet<String> =
            f.universals().iter().map(|n| n.to_string()).collect();
        keep_universals.retain(|n| !existential_names.contains(n));
        let reserved: BTreeSet<String> = reserved.difference(&keep_universals).cloned().collect();
        let g = rename_apart(f, &reserved);
        for t in g.blank_nodes() {
            if let Term::Blank(n) = t {
                existential_names.insert(n.to_string());
            }
        }
        existential_names.extend(g.existentials().iter().map(|n| n.to_string()));
        for n in g.universals() {
            acc.declare_universal(n);
        }
        for n in g.existentials() {
            acc.declare_existential(n);
        }
        acc.extend(g.triples().cloned());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Term {
        Term::iri_unchecked(format!("http://example.org/#{s}"))
    }

    fn t(s: Term, p: Term, o: Term) -> Triple {
        Triple::new(s, p, o)
    }

    #[test]
    fn substitution_replaces_top_level() {
        let mut f = Formula::from_triples([t(Term::universal("X"), iri("type"), iri("Man"))]);
        f.declare_universal("X");
        let b: Bindings = [(Term::universal("X"), iri("Socrates"))]
            .into_iter()
            .collect();
        let g = substitute_variables(&f, &b);
        assert_eq!(
            g,
            Formula::from_triples([t(iri("Socrates"), iri("type"), iri("Man"))])
        );
    }

    #[test]
    fn empty_bindings_are_identity() {
        let f = Formula::from_triples([t(iri("a"), iri("b"), iri("c"))]);
        assert_eq!(substitute_variables(&f, &Bindings::new()), f);
    }

    #[test]
    fn substitution_recurses_into_quoted_formulas() {
        let inner = Formula::from_triples([t(Term::universal("X"), iri("type"), iri("Man"))]);
        let mut f = Formula::from_triples([t(iri("j"), iri("says"), Term::quoted(inner))]);
        f.declare_universal("X");
        let b: Bindings = [(Term::universal("X"), iri("Peter"))].into_iter().collect();
        let expected_inner = Formula::from_triples([t(iri("Peter"), iri("type"), iri("Man"))]);
        let expected =
            Formula::from_triples([t(iri("j"), iri("says"), Term::quoted(expected_inner))]);
        assert_eq!(substitute_variables(&f, &b), expected);
    }

    #[test]
    fn substitution_respects_shadowing() {
        let mut inner = Formula::from_triples([t(Term::universal("X"), iri("p"), iri("o"))]);
        inner.declare_universal("X");
        let f = Formula::from_triples([t(
            Term::universal("X"),
            iri("says"),
            Term::quoted(inner.clone()),
        )]);
        let b: Bindings = [(Term::universal("X"), iri("a"))].into_iter().collect();
        let g = substitute_variables(&f, &b);
        let expected = Formula::from_triples([t(iri("a"), iri("says"), Term::quoted(inner))]);
        assert_eq!(g, expected);
    }

    #[test]
    fn rewrite_equals_is_opaque_to_quoting() {
        let said = Formula::from_triples([t(iri("Peter"), iri("p"), iri("o"))]);
        let f = Formula::from_triples([
            t(iri("Joe"), iri("says"), Term::quoted(said.clone())),
            t(iri("Peter"), iri("type"), iri("Person")),
        ]);
        let g = rewrite_equals(&f, &iri("Peter"), &iri("John"));
        let expected = Formula::from_triples([
            t(iri("Joe"), iri("says"), Term::quoted(said)),
            t(iri("John"), iri("type"), iri("Person")),
        ]);
        assert_eq!(g, expected);
    }

    #[test]
    fn rewrite_equals_replaces_all_top_level_occurrences() {
        let f = Formula::from_triples([t(iri("Peter"), iri("knows"), iri("Peter"))]);
        let g = rewrite_equals(&f, &iri("Peter"), &iri("John"));
        assert_eq!(
            g,
            Formula::from_triples([t(iri("John"), iri("knows"), iri("John"))])
        );
        let h = Formula::from_triples([t(iri("a"), iri("b"), iri("c"))]);
        assert_eq!(rewrite_equals(&h, &iri("x"), &iri("y")), h);
    }

    #[test]
    fn rename_apart_renames_collisions() {
        let mut f = Formula::from_triples([t(Term::universal("X"), iri("type"), iri("C"))]);
        f.declare_universal("X");
        let reserved: BTreeSet<String> = ["X".to_string()].into();
        let g = rename_apart(&f, &reserved);
        let mut expected = Formula::from_triples([t(Term::universal("X1"), iri("type"), iri("C"))]);
        expected.declare_universal("X1");
        assert_eq!(g, expected);
    }

    #[test]
    fn rename_apart_is_consistent_through_nesting() {
        let inner = Formula::from_triples([t(Term::universal("X"), iri("q"), iri("r"))]);
        let mut f = Formula::from_triples([t(Term::universal("X"), iri("p"), Term::quoted(inner))]);
        f.declare_universal("X");
        let reserved: BTreeSet<String> = ["X".to_string()].into();
        let g = rename_apart(&f, &reserved);
        // Structural walk: every occurrence, nested or not, uses the new name.
        let triple = g.triples().next().unwrap();
        assert_eq!(triple.subject, Term::universal("X1"));
        let nested = triple.object.as_formula().unwrap();
        assert_eq!(
            nested.triples().next().unwrap().subject,
            Term::universal("X1")
        );
    }

    #[test]
    fn conjoin_keeps_blank_nodes_apart() {
        let f = Formula::from_triples([t(Term::blank("b0"), iri("p"), Term::integer(1))]);
        let g = conjoin([&f, &f]);
        assert_eq!(g.len(), 2);
        assert_eq!(g.blank_nodes().len(), 2);
    }

    #[test]
    fn conjoin_of_disjoint_ground_formulas_is_union() {
        let f = Formula::from_triples([t(iri("a"), iri("b"), iri("c"))]);
        let g = Formula::from_triples([t(iri("d"), iri("e"), iri("f"))]);
        let h = conjoin([&f, &g]);
        assert_eq!(h.len(), 2);
        assert_eq!(conjoin([&Formula::new(), &f]), f);
    }
}
