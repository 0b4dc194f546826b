//! Graph pattern matching.
//!
//! Pattern variables bind to data terms. Inside quoted formulas, matching is
//! equality up to renaming: the pattern formula's own blank nodes and
//! declared variables correspond one-to-one with the data formula's, and
//! the triples correspond one-to-one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::mem::discriminant;

use crate::formula::{substitute_term, Formula};
use crate::term::{Bindings, Term, Triple};
use crate::vocab;

/// Match state: variable bindings plus the local-term correspondence of the
/// quoted formulas currently being compared.
#[derive(Clone, Default)]
pub(crate) struct State {
    pub bindings: Bindings,
    local: BTreeMap<(usize, Term), Term>,
    reverse: BTreeMap<(usize, Term), Term>,
    /// Variables matched to themselves, which `Bindings` cannot record.
    identity: BTreeSet<Term>,
}

impl State {
    pub fn new(bindings: Bindings) -> Self {
        State {
            bindings,
            ..State::default()
        }
    }

    /// The value of a pattern variable, if it has been matched.
    pub fn value<'a>(&'a self, var: &'a Term) -> Option<&'a Term> {
        match self.bindings.get(var) {
            Some(v) => Some(v),
            None if self.identity.contains(var) => Some(var),
            None => None,
        }
    }

    /// Binds `var` unless it already has a different value.
    pub fn bind(&mut self, var: &Term, value: &Term) -> bool {
        match self.value(var) {
            Some(v) => v == value,
            None if var == value => self.identity.insert(var.clone()),
            None => {
                self.bindings.insert(var.clone(), value.clone());
                true
            }
        }
    }
}

/// Level (1 = outermost quoted formula) at which `t` is local, if it is.
fn local_level(stack: &[&Formula], t: &Term) -> Option<usize> {
    match t {
        Term::Blank(_) if !stack.is_empty() => Some(stack.len()),
        Term::UniVar(_) | Term::ExiVar(_) => stack
            .iter()
            .enumerate()
            .rev()
            .find(|(_, f)| f.declares(t))
            .map(|(i, _)| i + 1),
        _ => None,
    }
}

fn mentions_local(stack: &[&Formula], t: &Term) -> bool {
    if stack.is_empty() {
        return false;
    }
    match t {
        Term::Blank(_) | Term::UniVar(_) | Term::ExiVar(_) => local_level(stack, t).is_some(),
        Term::List(items) => items.iter().any(|i| mentions_local(stack, i)),
        Term::Quoted(q) => q
            .free_variables()
            .iter()
            .any(|v| local_level(stack, v).is_some()),
        _ => false,
    }
}

pub(crate) struct Matcher<'v> {
    pub vars: &'v BTreeSet<Term>,
}

impl<'v> Matcher<'v> {
    /// True if `t` contains a pattern variable not bound in `b`.
    pub fn has_unbound(&self, t: &Term, b: &Bindings) -> bool {
        match t {
            Term::UniVar(_) | Term::ExiVar(_) | Term::Blank(_) => {
                self.vars.contains(t) && !b.contains(t)
            }
            Term::List(items) => items.iter().any(|i| self.has_unbound(i, b)),
            Term::Quoted(q) => q
                .free_variables()
                .iter()
                .any(|v| self.vars.contains(v) && !b.contains(v)),
            _ => false,
        }
    }

    pub fn match_triple(&self, p: &Triple, d: &Triple, st: State) -> Vec<State> {
        let mut ps = Vec::new();
        let mut ds = Vec::new();
        self.match_triple_in(&mut ps, &mut ds, p, d, st)
    }

    pub fn match_terms(&self, p: &Term, d: &Term, st: State) -> Vec<State> {
        let mut ps = Vec::new();
        let mut ds = Vec::new();
        self.match_term(&mut ps, &mut ds, p, d, st)
    }

    fn match_triple_in<'a>(
        &self,
        ps: &mut Vec<&'a Formula>,
        ds: &mut Vec<&'a Formula>,
        p: &'a Triple,
        d: &'a Triple,
        st: State,
    ) -> Vec<State> {
        let mut states = vec![st];
        for (x, y) in [
            (&p.predicate, &d.predicate),
            (&p.subject, &d.subject),
            (&p.object, &d.object),
        ] {
            let mut next = Vec::new();
            for s in states {
                next.extend(self.match_term(ps, ds, x, y, s));
            }
            if next.is_empty() {
                return next;
            }
            states = next;
        }
        states
    }

    fn match_term<'a>(
        &self,
        ps: &mut Vec<&'a Formula>,
        ds: &mut Vec<&'a Formula>,
        p: &'a Term,
        d: &'a Term,
        mut st: State,
    ) -> Vec<State> {
        if let Some(level) = local_level(ps, p) {
            if local_level(ds, d) != Some(level) || discriminant(p) != discriminant(d) {
                return Vec::new();
            }
            let key = (level, p.clone());
            let rkey = (level, d.clone());
            return match (st.local.get(&key), st.reverse.get(&rkey)) {
                (Some(x), _) => {
                    if x == d {
                        vec![st]
                    } else {
                        Vec::new()
                    }
                }
                (None, Some(_)) => Vec::new(),
                (None, None) => {
                    st.local.insert(key, d.clone());
                    st.reverse.insert(rkey, p.clone());
                    vec![st]
                }
            };
        }
        if self.vars.contains(p) {
            if mentions_local(ds, d) {
                return Vec::new();
            }
            return if st.bind(p, d) { vec![st] } else { Vec::new() };
        }
        match (p, d) {
            (Term::Quoted(qp), Term::Quoted(qd)) => {
                self.match_quoted(ps, ds, p, qp.formula(), qd.formula(), d, st)
            }
            (Term::List(_), _) | (_, Term::List(_)) => {
                let (Some(pi), Some(di)) = (p.as_list(), d.as_list()) else {
                    return Vec::new();
                };
                if pi.len() != di.len() {
                    return Vec::new();
                }
                let mut states = vec![st];
                for (x, y) in pi.iter().zip(di.iter()) {
                    let mut next = Vec::new();
                    for s in states {
                        next.extend(self.match_term(ps, ds, x, y, s));
                    }
                    if next.is_empty() {
                        return next;
                    }
                    states = next;
                }
                states
            }
            _ => {
                if p == d && local_level(ds, d).is_none() {
                    vec![st]
                } else {
                    Vec::new()
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn match_quoted<'a>(
        &self,
        ps: &mut Vec<&'a Formula>,
        ds: &mut Vec<&'a Formula>,
        p: &'a Term,
        pf: &'a Formula,
        df: &'a Formula,
        d: &'a Term,
        st: State,
    ) -> Vec<State> {
        let Term::Quoted(qp) = p else { unreachable!() };
        let open: Vec<&Term> = qp
            .free_variables()
            .iter()
            .filter(|v| self.vars.contains(*v) || local_level(ps, v).is_some())
            .collect();
        if open.is_empty() {
            return if p == d && !mentions_local(ds, d) {
                vec![st]
            } else {
                Vec::new()
            };
        }
        if open.iter().all(|v| st.bindings.contains(v))
            && open.iter().all(|v| local_level(ps, v).is_none())
        {
            let b = st.bindings.restrict(open.iter().copied());
            return if substitute_term(p, &b) == *d && !mentions_local(ds, d) {
                vec![st]
            } else {
                Vec::new()
            };
        }
        if pf.len() != df.len()
            || pf.universals().len() != df.universals().len()
            || pf.existentials().len() != df.existentials().len()
        {
            return Vec::new();
        }
        ps.push(pf);
        ds.push(df);
        let level = ps.len();
        let pts: Vec<&'a Triple> = pf.triples().collect();
        let dts: Vec<&'a Triple> = df.triples().collect();
        let mut used = vec![false; dts.len()];
        let mut results = Vec::new();
        self.match_bijection(ps, ds, &pts, &dts, &mut used, st, &mut results);
        ps.pop();
        ds.pop();
        let mut seen = BTreeSet::new();
        results
            .into_iter()
            .map(|mut s| {
                s.local.retain(|(l, _), _| *l < level);
                s.reverse.retain(|(l, _), _| *l < level);
                s
            })
            .filter(|s| seen.insert((s.bindings.clone(), s.local.clone())))
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn match_bijection<'a>(
        &self,
        ps: &mut Vec<&'a Formula>,
        ds: &mut Vec<&'a Formula>,
        pts: &[&'a Triple],
        dts: &[&'a Triple],
        used: &mut [bool],
        st: State,
        out: &mut Vec<State>,
    ) {
        let Some((first, rest)) = pts.split_first() else {
            out.push(st);
            return;
        };
        for i in 0..dts.len() {
            if used[i] {
                continue;
            }
            let states = self.match_triple_in(ps, ds, first, dts[i], st.clone());
            if states.is_empty() {
                continue;
            }
            used[i] = true;
            for s in states {
                self.match_bijection(ps, ds, rest, dts, used, s, out);
            }
            used[i] = false;
        }
    }
}

/// Append-only triple store with position indexes.
#[derive(Default, Clone)]
pub(crate) struct Store {
    triples: Vec<Triple>,
    present: BTreeSet<Triple>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

fn indexable(t: &Term) -> bool {
    match t {
        Term::List(_) => false,
        Term::Iri(i) => i.as_str() != vocab::RDF_NIL,
        _ => true,
    }
}

impl Store {
    pub fn from_formula(f: &Formula) -> Self {
        let mut s = Store::default();
        for t in f.triples() {
            s.insert(t.clone());
        }
        s
    }

    pub fn insert(&mut self, t: Triple) -> bool {
        if self.present.contains(&t) {
            return false;
        }
        let i = self.triples.len();
        for (term, index) in [
            (&t.subject, &mut self.by_subject),
            (&t.predicate, &mut self.by_predicate),
            (&t.object, &mut self.by_object),
        ] {
            if indexable(term) {
                index.entry(term.clone()).or_default().push(i);
            }
        }
        self.present.insert(t.clone());
        self.triples.push(t);
        true
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn get(&self, i: usize) -> &Triple {
        &self.triples[i]
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Indexes of triples that may match `pattern` once `b` is applied,
    /// or `None` for "all triples".
    pub fn candidates(&self, m: &Matcher, pattern: &Triple, b: &Bindings) -> Option<&[usize]> {
        let mut best: Option<&[usize]> = None;
        for (term, index) in [
            (&pattern.subject, &self.by_subject),
            (&pattern.predicate, &self.by_predicate),
            (&pattern.object, &self.by_object),
        ] {
            let value = if m.vars.contains(term) {
                match b.get(term) {
                    Some(v) => v,
                    None => continue,
                }
            } else if m.has_unbound(term, b) || matches!(term, Term::Quoted(_)) {
                continue;
            } else {
                term
            };
            if !indexable(value) {
                continue;
            }
            let hits = index.get(value).map(Vec::as_slice).unwrap_or(&[]);
            if best.is_none_or(|cur| hits.len() < cur.len()) {
                best = Some(hits);
            }
        }
        best
    }
}

/// All ways of matching the pattern formula's triples (each against some
/// data triple) extending `seed`.
pub fn match_formula(pattern: &Formula, data: &Formula, seed: &Bindings) -> Vec<Bindings> {
    let vars = pattern_variables(pattern);
    let store = Store::from_formula(data);
    let mut out = Vec::new();
    let goals: Vec<&Triple> = pattern.triples().collect();
    solve_graph(
        &Matcher { vars: &vars },
        &store,
        &goals,
        State::new(seed.clone()),
        usize::MAX,
        &mut out,
    );
    let mut seen = BTreeSet::new();
    out.into_iter().filter(|b| seen.insert(b.clone())).collect()
}

/// Variables of a formula used as a pattern: its declared variables and its
/// blank nodes.
pub(crate) fn pattern_variables(pattern: &Formula) -> BTreeSet<Term> {
    let mut vars = pattern.blank_nodes();
    vars.extend(pattern.declared_variables());
    vars
}

pub(crate) fn solve_graph(
    m: &Matcher,
    store: &Store,
    goals: &[&Triple],
    st: State,
    limit: usize,
    out: &mut Vec<Bindings>,
) {
    if out.len() >= limit {
        return;
    }
    if goals.is_empty() {
        out.push(st.bindings);
        return;
    }
    let mut best = 0;
    let mut best_count = usize::MAX;
    for (i, g) in goals.iter().enumerate() {
        let n = store
            .candidates(m, g, &st.bindings)
            .map_or(store.len(), <[usize]>::len);
        if n < best_count {
            best = i;
            best_count = n;
        }
    }
    if best_count == 0 {
        return;
    }
    let goal = goals[best];
    let rest: Vec<&Triple> = goals
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, g)| *g)
        .collect();
    let all: Vec<usize>;
    let candidates = match store.candidates(m, goal, &st.bindings) {
        Some(c) => c,
        None => {
            all = (0..store.len()).collect();
            &all
        }
    };
    for &i in candidates {
        for s in m.match_triple(goal, store.get(i), st.clone()) {
            solve_graph(m, store, &rest, s, limit, out);
            if out.len() >= limit {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_document;

    const P: &str =
        "@prefix : <http://example.org/#>. @prefix foaf: <http://xmlns.com/foaf/0.1/>.\n";

    fn f(text: &str) -> Formula {
        parse_document(&format!("{P}{text}"), "http://example.org/doc").unwrap()
    }

    fn var(n: &str) -> Term {
        Term::universal(n)
    }

    fn iri(s: &str) -> Term {
        Term::iri(s).unwrap()
    }

    #[test]
    fn homepage_lookup() {
        let pattern = f("@forAll :X, :H. :X foaf:homepage :H .");
        let data = f(":judy foaf:homepage <http://example.org/h> . :a :b :c .");
        let r = match_formula(&pattern, &data, &Bindings::new());
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].get(&var("X")), Some(&iri("http://example.org/#judy")));
        assert_eq!(r[0].get(&var("H")), Some(&iri("http://example.org/h")));
    }

    #[test]
    fn empty_pattern_gives_one_empty_binding() {
        let r = match_formula(&Formula::new(), &f(":a :b :c ."), &Bindings::new());
        assert_eq!(r, vec![Bindings::new()]);
    }

    #[test]
    fn repeated_variable_constrains() {
        let r = match_formula(
            &f("@forAll :X. :X :p :X ."),
            &f(":a :p :b ."),
            &Bindings::new(),
        );
        assert!(r.is_empty());
    }

    #[test]
    fn self_matches_still_constrain() {
        let x = Term::blank("x");
        let p = iri("http://example.org/#p");
        let pattern = Formula::from_triples([Triple::new(x.clone(), p.clone(), x.clone())]);
        let data = Formula::from_triples([Triple::new(
            x.clone(),
            p.clone(),
            iri("http://example.org/#c"),
        )]);
        assert!(match_formula(&pattern, &data, &Bindings::new()).is_empty());
        let data = Formula::from_triples([Triple::new(x.clone(), p, x)]);
        assert_eq!(match_formula(&pattern, &data, &Bindings::new()).len(), 1);
    }

    #[test]
    fn quoted_patterns_bind_inside() {
        let r = match_formula(
            &f("@forAll :X. :j :says { :X a :M } ."),
            &f(":j :says { :peter a :M } ."),
            &Bindings::new(),
        );
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].get(&var("X")), Some(&iri("http://example.org/#peter")));
    }

    #[test]
    fn quoted_locals_correspond_bijectively() {
        let pattern = f("@forAll :X. :j :says { [ :p :X ] :q [ ] } .");
        let data = f(":j :says { [ :p 1 ] :q [ ] } .");
        let r = match_formula(&pattern, &data, &Bindings::new());
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].get(&var("X")), Some(&Term::integer(1)));
        let data = f(":j :says { _:a :p 1 . _:a :q _:a } .");
        let pattern = f(":j :says { _:x :p 1 . _:x :q _:y } .");
        assert!(match_formula(&pattern, &data, &Bindings::new()).is_empty());
    }

    #[test]
    fn variables_do_not_capture_quoted_locals() {
        let pattern = f("@forAll :X. :j :says { :X :p 1 } .");
        let data = f(":j :says { [ ] :p 1 } .");
        assert!(match_formula(&pattern, &data, &Bindings::new()).is_empty());
    }

    #[test]
    fn blank_nodes_in_pattern_match_anything() {
        let pattern = f("[ :p 1 ] .");
        let data = f(":a :p 1 .");
        assert_eq!(match_formula(&pattern, &data, &Bindings::new()).len(), 1);
    }
}
