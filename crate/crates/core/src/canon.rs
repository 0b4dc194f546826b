//! Canonical relabeling of blank nodes and variables.
//!
//! Items (blank nodes and renamable variables) are colored by an iterative
//! signature refinement: an item's signature is the multiset of the triples it
//! occurs in, with every other item replaced by its current color. When
//! refinement stalls with a non-singleton cell, each member is individualized
//! in turn and the smallest resulting formula is kept. Cells whose members are
//! pairwise interchangeable are only branched on once.
//!
//! The same routine serves three purposes: canonical local names for quoted
//! formulas (so quoted terms compare up to renaming), the isomorphism test,
//! and the canonical text form.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::formula::{fresh_name, rename, Formula};
use crate::term::{Term, Triple};

/// Upper bound on explored labelings. Past it the best labeling found so far
/// is used, which keeps pathological symmetric inputs fast at the price of a
/// possibly non-canonical result.
const LEAF_BUDGET: usize = 4096;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scope {
    /// Only the formula's own blank nodes and declared variables are renamed.
    Local,
    /// Free variables are renamed too.
    Full,
}

/// Canonical form used for quoted formulas.
pub(crate) fn canonicalize_local(f: Formula) -> Formula {
    if f.blank_nodes().is_empty() && f.universals().is_empty() && f.existentials().is_empty() {
        return f;
    }
    Canonicalizer::new(f, Scope::Local).run()
}

/// Canonical representative of the formula's isomorphism class: blank nodes
/// and all variables are relabeled deterministically, and existentials that
/// occur only at the formula's own level become blank nodes.
pub fn canonicalize(f: &Formula) -> Formula {
    Canonicalizer::new(f.clone(), Scope::Full).run()
}

/// True iff a bijective renaming of blank nodes and variables maps one
/// formula onto the other.
pub fn isomorphic(f: &Formula, g: &Formula) -> bool {
    if f.len() != g.len() {
        return false;
    }
    if f == g {
        return true;
    }
    canonicalize(f) == canonicalize(g)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Blank,
    ExiDeclared,
    ExiFree,
    UniDeclared,
    UniFree,
}

struct Canonicalizer {
    formula: Formula,
    triples: Vec<Triple>,
    items: Vec<Term>,
    kinds: Vec<Kind>,
    index: HashMap<Term, usize>,
    /// For each item, the indices of the triples it occurs in.
    occurrences: Vec<Vec<usize>>,
    /// Variable names that must not be used as canonical names.
    fixed: BTreeSet<Arc<str>>,
    leaves: usize,
    best: Option<Formula>,
}

impl Canonicalizer {
    fn new(f: Formula, scope: Scope) -> Self {
        let f = existentials_to_blanks(f, scope);
        let free = f.free_variables();
        let mut items: Vec<(Term, Kind)> = Vec::new();
        items.extend(f.blank_nodes().into_iter().map(|b| (b, Kind::Blank)));
        items.extend(
            f.existentials()
                .iter()
                .map(|n| (Term::ExiVar(n.clone()), Kind::ExiDeclared)),
        );
        items.extend(
            f.universals()
                .iter()
                .map(|n| (Term::UniVar(n.clone()), Kind::UniDeclared)),
        );
        let mut fixed = BTreeSet::new();
        for v in &free {
            match (scope, v) {
                (Scope::Full, Term::ExiVar(_)) => items.push((v.clone(), Kind::ExiFree)),
                (Scope::Full, Term::UniVar(_)) => items.push((v.clone(), Kind::UniFree)),
                (_, Term::UniVar(n) | Term::ExiVar(n)) => {
                    fixed.insert(n.clone());
                }
                _ => {}
            }
        }
        let index: HashMap<Term, usize> = items
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        let triples: Vec<Triple> = f.triples().cloned().collect();
        let mut occurrences = vec![Vec::new(); items.len()];
        for (ti, t) in triples.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for term in t.terms() {
                collect_items(term, &index, &mut seen);
            }
            for i in seen {
                occurrences[i].push(ti);
            }
        }
        let (items, kinds) = items.into_iter().unzip();
        Canonicalizer {
            formula: f,
            triples,
            items,
            kinds,
            index,
            occurrences,
            fixed,
            leaves: 0,
            best: None,
        }
    }

    fn run(mut self) -> Formula {
        if self.items.is_empty() {
            return self.formula;
        }
        let mut order: Vec<Kind> = self.kinds.clone();
        order.sort();
        order.dedup();
        let colors: Vec<usize> = self
            .kinds
            .iter()
            .map(|k| order.iter().position(|o| o == k).unwrap())
            .collect();
        self.search(colors);
        self.best.expect("at least one labeling")
    }

    fn search(&mut self, colors: Vec<usize>) {
        let colors = self.refine(colors);
        let n = self.items.len();
        let distinct = colors.iter().collect::<BTreeSet<_>>().len();
        if distinct == n {
            self.leaf(&colors);
            return;
        }
        // First non-singleton cell in color order.
        let mut counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in colors.iter().enumerate() {
            counts.entry(c).or_default().push(i);
        }
        let (&cell_color, cell) = counts
            .iter()
            .find(|(_, members)| members.len() > 1)
            .unwrap();
        let cell = cell.clone();
        let branches: Vec<usize> = if self.interchangeable(&cell) {
            vec![cell[0]]
        } else {
            cell.clone()
        };
        for m in branches {
            if self.leaves >= LEAF_BUDGET && self.best.is_some() {
                break;
            }
            let individualized: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    if c > cell_color || (c == cell_color && i != m) {
                        c + 1
                    } else {
                        c
                    }
                })
                .collect();
            self.search(individualized);
        }
    }

    /// Refines the coloring until the number of colors stops growing.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut distinct = colors.iter().collect::<BTreeSet<_>>().len();
        loop {
            let keys: Vec<(usize, Vec<u64>)> = (0..self.items.len())
                .map(|i| {
                    let mut sig: Vec<u64> = self.occurrences[i]
                        .iter()
                        .map(|&t| self.triple_signature(t, i, &colors))
                        .collect();
                    sig.sort_unstable();
                    (colors[i], sig)
                })
                .collect();
            let mut ranked: Vec<&(usize, Vec<u64>)> = keys.iter().collect();
            ranked.sort();
            ranked.dedup();
            let next: Vec<usize> = keys
                .iter()
                .map(|k| ranked.binary_search(&k).unwrap())
                .collect();
            let next_distinct = ranked.len();
            colors = next;
            if next_distinct == distinct {
                return colors;
            }
            distinct = next_distinct;
        }
    }

    fn triple_signature(&self, ti: usize, me: usize, colors: &[usize]) -> u64 {
        let mut h = DefaultHasher::new();
        for (pos, term) in self.triples[ti].terms().into_iter().enumerate() {
            pos.hash(&mut h);
            self.hash_term(term, me, colors, &mut h);
        }
        h.finish()
    }

    fn hash_term(&self, term: &Term, me: usize, colors: &[usize], h: &mut DefaultHasher) {
        if let Some(&i) = self.index.get(term) {
            if i == me {
                0u8.hash(h);
            } else {
                1u8.hash(h);
                colors[i].hash(h);
            }
            return;
        }
        match term {
            Term::List(items) => {
                2u8.hash(h);
                items.len().hash(h);
                for t in items.iter() {
                    self.hash_term(t, me, colors, h);
                }
            }
            Term::Quoted(q) => {
                let mut inside: Vec<(usize, bool)> = q
                    .free_variables()
                    .iter()
                    .filter_map(|v| self.index.get(v))
                    .map(|&i| (colors[i], i == me))
                    .collect();
                if inside.is_empty() {
                    3u8.hash(h);
                    term.hash(h);
                } else {
                    // The inner structure depends on the names being chosen,
                    // so only rename-invariant features are used.
                    4u8.hash(h);
                    q.len().hash(h);
                    inside.sort_unstable();
                    inside.hash(h);
                }
            }
            _ => {
                5u8.hash(h);
                term.hash(h);
            }
        }
    }

    /// True if swapping the first member with any other yields the same
    /// formula, in which case all members are interchangeable.
    fn interchangeable(&self, cell: &[usize]) -> bool {
        let a = &self.items[cell[0]];
        cell[1..].iter().all(|&j| {
            let b = &self.items[j];
            let map: BTreeMap<Term, Term> = [(a.clone(), b.clone()), (b.clone(), a.clone())].into();
            rename(&self.formula, &map) == self.formula
        })
    }

    fn leaf(&mut self, colors: &[usize]) {
        self.leaves += 1;
        let mut order: Vec<usize> = (0..self.items.len()).collect();
        order.sort_by_key(|&i| colors[i]);
        let mut map = BTreeMap::new();
        let (mut nb, mut ne, mut nu) = (0usize, 0usize, 0usize);
        for i in order {
            let new = match self.kinds[i] {
                Kind::Blank => {
                    nb += 1;
                    Term::blank(format!("c{}", nb - 1))
                }
                Kind::ExiDeclared | Kind::ExiFree => {
                    Term::existential(self.next_name("e", &mut ne))
                }
                Kind::UniDeclared | Kind::UniFree => Term::universal(self.next_name("v", &mut nu)),
            };
            map.insert(self.items[i].clone(), new);
        }
        let candidate = rename(&self.formula, &map);
        if self.best.as_ref().is_none_or(|b| candidate < *b) {
            self.best = Some(candidate);
        }
    }

    fn next_name(&self, prefix: &str, counter: &mut usize) -> String {
        loop {
            let name = format!("{prefix}{counter}");
            *counter += 1;
            if !self.fixed.contains(name.as_str()) {
                return name;
            }
        }
    }
}

fn collect_items(term: &Term, index: &HashMap<Term, usize>, out: &mut BTreeSet<usize>) {
    if let Some(&i) = index.get(term) {
        out.insert(i);
        return;
    }
    match term {
        Term::List(items) => items.iter().for_each(|t| collect_items(t, index, out)),
        Term::Quoted(q) => {
            for v in q.free_variables() {
                if let Some(&i) = index.get(v) {
                    out.insert(i);
                }
            }
        }
        _ => {}
    }
}

/// Existential variables that never occur inside a nested formula mean the
/// same as blank nodes; rewrite them as such so both spellings canonicalize
/// alike.
fn existentials_to_blanks(f: Formula, scope: Scope) -> Formula {
    let mut nested_free: BTreeSet<Term> = BTreeSet::new();
    for t in f.triples() {
        for term in t.terms() {
            collect_nested_free(term, &mut nested_free);
        }
    }
    let mut candidates: Vec<Term> = f
        .existentials()
        .iter()
        .map(|n| Term::ExiVar(n.clone()))
        .collect();
    if scope == Scope::Full {
        candidates.extend(
            f.free_variables()
                .into_iter()
                .filter(|v| matches!(v, Term::ExiVar(_))),
        );
    }
    candidates.retain(|v| !nested_free.contains(v));
    if candidates.is_empty() {
        return f;
    }
    let mut taken: BTreeSet<String> = f.names_in_use().iter().map(|n| n.to_string()).collect();
    let mut map = BTreeMap::new();
    for v in candidates {
        let Term::ExiVar(n) = &v else { unreachable!() };
        let fresh = fresh_name(&format!("x{n}"), |c| taken.contains(c));
        taken.insert(fresh.clone());
        map.insert(v, Term::blank(fresh));
    }
    rename(&f, &map)
}

fn collect_nested_free(term: &Term, out: &mut BTreeSet<Term>) {
    match term {
        Term::List(items) => items.iter().for_each(|t| collect_nested_free(t, out)),
        Term::Quoted(q) => out.extend(q.free_variables().iter().cloned()),
        _ => {}
    }
}
