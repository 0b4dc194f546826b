//! N3 derivation: inclusion tests, rule application and deductive closure.
//!
//! `includes` is pure graph matching (conjunction elimination and
//! introduction, universal elimination, existential introduction and
//! variable renaming). Rule application adds builtin evaluation and
//! modus ponens. Closure is a semi-naive fixpoint: after the first round a
//! rule is only re-evaluated for matches that use a triple derived in the
//! previous round.

pub(crate) mod matcher;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::builtins::{Builtin, EvalContext, EvalOutcome, Registry};
use crate::error::{EngineError, LimitKind};
use crate::formula::{fresh_name, substitute_triple, Formula};
use crate::term::{Bindings, Term, Triple};
use crate::vocab;

pub use matcher::match_formula;
use matcher::{pattern_variables, solve_graph, Matcher, State, Store};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineLimits {
    pub max_iterations: usize,
    /// Maximum number of triples a closure may add.
    pub max_triples: usize,
    /// A builtin evaluation that takes longer than this is discarded.
    pub builtin_timeout: Duration,
    pub network_allowed: bool,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits {
            max_iterations: 10_000,
            max_triples: 1_000_000,
            builtin_timeout: Duration::from_secs(60),
            network_allowed: true,
        }
    }
}

impl EngineLimits {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_iterations == 0 {
            return Err(EngineError::InvalidLimits(
                "max_iterations must be positive".into(),
            ));
        }
        if self.max_triples == 0 {
            return Err(EngineError::InvalidLimits(
                "max_triples must be positive".into(),
            ));
        }
        if self.builtin_timeout.is_zero() {
            return Err(EngineError::InvalidLimits(
                "builtin_timeout must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A `log:implies` statement between two quoted formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub antecedent: Formula,
    pub consequent: Formula,
    /// Variables quantified outside the rule that occur in it.
    pub universals: BTreeSet<Term>,
    source: Triple,
    /// Rule variables occurring in the antecedent.
    bound: BTreeSet<Term>,
    pattern_vars: BTreeSet<Term>,
}

impl Rule {
    /// `None` if the triple is not a rule; `Some(Err)` if it is a rule that
    /// cannot fire.
    pub fn from_triple(t: &Triple) -> Option<Result<Rule, String>> {
        if !t.has_predicate(vocab::LOG_IMPLIES) {
            return None;
        }
        let (Term::Quoted(a), Term::Quoted(c)) = (&t.subject, &t.object) else {
            return None;
        };
        let is_universal = |v: &&Term| matches!(v, Term::UniVar(_));
        let bound: BTreeSet<Term> = a
            .free_variables()
            .iter()
            .filter(is_universal)
            .cloned()
            .collect();
        let unbound: Vec<&Term> = c
            .free_variables()
            .iter()
            .filter(is_universal)
            .filter(|v| !bound.contains(*v))
            .collect();
        if !unbound.is_empty() {
            return Some(Err(format!(
                "rule ignored: consequent variables {} are not bound by the antecedent",
                unbound
                    .iter()
                    .map(|v| format!("{v:?}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        let mut pattern_vars = pattern_variables(a.formula());
        pattern_vars.extend(bound.iter().cloned());
        let mut universals = bound.clone();
        universals.extend(c.free_variables().iter().filter(is_universal).cloned());
        Some(Ok(Rule {
            antecedent: a.formula().clone(),
            consequent: c.formula().clone(),
            universals,
            source: t.clone(),
            bound,
            pattern_vars,
        }))
    }

    pub fn source(&self) -> &Triple {
        &self.source
    }
}

/// The rules stated at the top level of `f`, with diagnostics for rules that
/// cannot fire. Rules inside quoted formulas are not extracted.
pub fn extract_rules(f: &Formula) -> (Vec<Rule>, Vec<String>) {
    let mut rules = Vec::new();
    let mut diagnostics = Vec::new();
    for t in f.triples() {
        match Rule::from_triple(t) {
            Some(Ok(r)) => rules.push(r),
            Some(Err(e)) => diagnostics.push(e),
            None => {}
        }
    }
    (rules, diagnostics)
}

/// The (rule, bindings) pairs that have already fired.
#[derive(Debug, Default, Clone)]
pub struct FiringRecord {
    fired: BTreeSet<(Triple, Bindings)>,
}

impl FiringRecord {
    pub fn new() -> Self {
        FiringRecord::default()
    }

    /// Records a firing; false if this rule already fired for these values
    /// of its antecedent variables.
    pub fn record(&mut self, rule: &Rule, b: &Bindings) -> bool {
        self.fired
            .insert((rule.source.clone(), b.restrict(&rule.bound)))
    }

    pub fn len(&self) -> usize {
        self.fired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fired.is_empty()
    }
}

// -- inclusion

/// True if `g` can be derived from `f` by N3 derivation without rules.
pub fn includes(f: &Formula, g: &Formula) -> bool {
    includes_witness(f, g).is_some()
}

/// The first binding of `g`'s variables and blank nodes that embeds it in
/// `f`.
pub fn includes_witness(f: &Formula, g: &Formula) -> Option<Bindings> {
    let vars = pattern_variables(g);
    let store = Store::from_formula(f);
    let goals: Vec<&Triple> = g.triples().collect();
    let mut out = Vec::new();
    solve_graph(
        &Matcher { vars: &vars },
        &store,
        &goals,
        State::default(),
        1,
        &mut out,
    );
    out.pop()
}

pub fn not_includes(f: &Formula, g: &Formula) -> bool {
    !includes(f, g)
}

/// Inclusion where `outer` variables free in `g` may also bind. Returns the
/// distinct bindings of those outer variables, at most `limit` of them.
pub(crate) fn includes_bindings(
    f: &Formula,
    g: &Formula,
    outer: &BTreeSet<Term>,
    limit: usize,
) -> Vec<Bindings> {
    let mut vars = pattern_variables(g);
    let open: Vec<Term> = g
        .free_variables()
        .into_iter()
        .filter(|v| outer.contains(v))
        .collect();
    vars.extend(open.iter().cloned());
    let store = Store::from_formula(f);
    let goals: Vec<&Triple> = g.triples().collect();
    let mut raw = Vec::new();
    let cap = if open.is_empty() { 1 } else { usize::MAX };
    solve_graph(
        &Matcher { vars: &vars },
        &store,
        &goals,
        State::default(),
        cap,
        &mut raw,
    );
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for b in raw {
        let r = b.restrict(&open);
        if seen.insert(r.clone()) {
            out.push(r);
            if out.len() >= limit {
                break;
            }
        }
    }
    out
}

/// Matches `pattern` against `data` with the given terms as variables.
pub(crate) fn match_with_variables(
    pattern: &Formula,
    data: &Formula,
    vars: &BTreeSet<Term>,
) -> Vec<Bindings> {
    let store = Store::from_formula(data);
    let goals: Vec<&Triple> = pattern.triples().collect();
    let mut out = Vec::new();
    solve_graph(
        &Matcher { vars },
        &store,
        &goals,
        State::default(),
        usize::MAX,
        &mut out,
    );
    out
}

// -- solving antecedents

#[derive(Clone, Copy)]
enum Goal<'a> {
    Graph(&'a Triple),
    Builtin(&'a Triple, &'static Builtin),
}

fn goals_of<'a>(f: &'a Formula, registry: &'static Registry) -> Vec<Goal<'a>> {
    f.triples()
        .map(|t| match &t.predicate {
            Term::Iri(p) => match registry.get(p.as_str()) {
                Some(b) => Goal::Builtin(t, b),
                None => Goal::Graph(t),
            },
            _ => Goal::Graph(t),
        })
        .collect()
}

struct Solver<'a> {
    store: &'a Store,
    vars: &'a BTreeSet<Term>,
    ctx: &'a EvalContext,
    timeout: Duration,
}

impl Solver<'_> {
    fn matcher(&self) -> Matcher<'_> {
        Matcher { vars: self.vars }
    }

    fn solve(&self, goals: &[Goal], st: State, out: &mut Vec<Bindings>) {
        if goals.is_empty() {
            out.push(st.bindings);
            return;
        }
        let m = self.matcher();
        let b = &st.bindings;
        // Builtins whose arguments are all known are cheap filters.
        for (i, g) in goals.iter().enumerate() {
            if let Goal::Builtin(t, builtin) = g {
                if !m.has_unbound(&t.subject, b) && !m.has_unbound(&t.object, b) {
                    let outcome = self.evaluate(t, builtin, &st);
                    if let EvalOutcome::NotEvaluable(reason) = &outcome {
                        self.ctx.diagnostic(reason.clone());
                        return;
                    }
                    return self.continue_with(outcome, goals, i, st, out);
                }
            }
        }
        // Then the graph triple with the fewest candidates.
        let mut best: Option<(usize, usize)> = None;
        for (i, g) in goals.iter().enumerate() {
            if let Goal::Graph(t) = g {
                let n = self
                    .store
                    .candidates(&m, t, b)
                    .map_or(self.store.len(), <[usize]>::len);
                if best.is_none_or(|(_, cur)| n < cur) {
                    best = Some((i, n));
                }
            }
        }
        if let Some((i, n)) = best {
            if n == 0 {
                return;
            }
            let Goal::Graph(t) = goals[i] else {
                unreachable!()
            };
            let rest = without(goals, i);
            let all: Vec<usize>;
            let candidates = match self.store.candidates(&m, t, b) {
                Some(c) => c,
                None => {
                    all = (0..self.store.len()).collect();
                    &all
                }
            };
            for &c in candidates {
                for next in m.match_triple(t, self.store.get(c), st.clone()) {
                    self.solve(&rest, next, out);
                }
            }
            return;
        }
        // Only builtins with unknowns remain: take the first that can run.
        let mut reasons = Vec::new();
        for (i, g) in goals.iter().enumerate() {
            if let Goal::Builtin(t, builtin) = g {
                match self.evaluate(t, builtin, &st) {
                    EvalOutcome::NotEvaluable(reason) => reasons.push(reason),
                    outcome => return self.continue_with(outcome, goals, i, st, out),
                }
            }
        }
        self.ctx.diagnostic(format!(
            "match abandoned, builtin never evaluable: {}",
            reasons.join("; ")
        ));
    }

    fn evaluate(&self, t: &Triple, builtin: &Builtin, st: &State) -> EvalOutcome {
        let s = crate::formula::substitute_term(&t.subject, &st.bindings);
        let o = crate::formula::substitute_term(&t.object, &st.bindings);
        let unbound: BTreeSet<Term> = self
            .vars
            .iter()
            .filter(|v| st.value(v).is_none())
            .cloned()
            .collect();
        let started = Instant::now();
        let outcome = builtin.call(&s, &o, &unbound, self.ctx);
        if started.elapsed() > self.timeout {
            self.ctx.diagnostic(format!(
                "{}: evaluation exceeded {:?}, result discarded",
                crate::builtins::short_name(&builtin.signature.iri),
                self.timeout
            ));
            return EvalOutcome::Unsatisfied;
        }
        outcome
    }

    fn continue_with(
        &self,
        outcome: EvalOutcome,
        goals: &[Goal],
        i: usize,
        st: State,
        out: &mut Vec<Bindings>,
    ) {
        let EvalOutcome::Satisfied(solutions) = outcome else {
            return;
        };
        let rest = without(goals, i);
        for extra in solutions {
            let mut next = st.clone();
            if extra.iter().all(|(k, v)| next.bind(k, v)) {
                self.solve(&rest, next, out);
            }
        }
    }
}

fn without<'a>(goals: &[Goal<'a>], i: usize) -> Vec<Goal<'a>> {
    goals
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, g)| *g)
        .collect()
}

// -- firing rules

/// Generates names for new blank nodes and variables that do not clash with
/// the names already in a formula.
struct Namer {
    taken: BTreeSet<String>,
    counter: usize,
}

impl Namer {
    fn for_formula(f: &Formula) -> Self {
        Namer {
            taken: f.names_in_use().iter().map(|n| n.to_string()).collect(),
            counter: 0,
        }
    }

    fn blank(&mut self) -> Term {
        loop {
            let name = format!("g{}", self.counter);
            self.counter += 1;
            if self.taken.insert(name.clone()) {
                return Term::blank(name);
            }
        }
    }

    fn variable(&mut self, base: &str) -> Arc<str> {
        let name = fresh_name(base, |c| self.taken.contains(c));
        self.taken.insert(name.clone());
        Arc::from(name.as_str())
    }
}

/// The consequent of `rule` under `b`, with fresh blank nodes for its
/// existentials and fresh names for the universals it declares.
fn instantiate(
    rule: &Rule,
    b: &Bindings,
    namer: &mut Namer,
) -> Result<(Vec<Triple>, Vec<Arc<str>>), String> {
    let mut map = b.restrict(&rule.universals);
    if let Some(v) = rule
        .universals
        .iter()
        .find(|v| !map.contains(v) && rule.consequent_mentions(v))
    {
        return Err(format!("rule consequent left {v:?} unbound"));
    }
    for blank in rule.consequent.blank_nodes() {
        map.insert(blank, namer.blank());
    }
    for e in rule.consequent.existentials() {
        map.insert(Term::ExiVar(e.clone()), namer.blank());
    }
    let mut declared = Vec::new();
    for u in rule.consequent.universals() {
        let name = namer.variable(u);
        map.insert(Term::UniVar(u.clone()), Term::UniVar(name.clone()));
        declared.push(name);
    }
    let mut triples = Vec::new();
    for t in rule.consequent.triples() {
        let t = substitute_triple(t, &map);
        if t.is_well_formed() {
            triples.push(t);
        }
    }
    Ok((triples, declared))
}

impl Rule {
    fn consequent_mentions(&self, v: &Term) -> bool {
        self.consequent.free_variables().contains(v)
    }

    fn solve_full(&self, store: &Store, ctx: &EvalContext, timeout: Duration) -> Vec<Bindings> {
        let goals = goals_of(&self.antecedent, Registry::standard());
        let solver = Solver {
            store,
            vars: &self.pattern_vars,
            ctx,
            timeout,
        };
        let mut out = Vec::new();
        solver.solve(&goals, State::default(), &mut out);
        out
    }

    /// Matches that use at least one triple from `delta` (store indexes).
    fn solve_delta(
        &self,
        store: &Store,
        delta: std::ops::Range<usize>,
        ctx: &EvalContext,
        timeout: Duration,
    ) -> Vec<Bindings> {
        let goals = goals_of(&self.antecedent, Registry::standard());
        let solver = Solver {
            store,
            vars: &self.pattern_vars,
            ctx,
            timeout,
        };
        let m = solver.matcher();
        let mut out = Vec::new();
        for (i, g) in goals.iter().enumerate() {
            let Goal::Graph(pattern) = g else { continue };
            let rest = without(&goals, i);
            for d in delta.clone() {
                for st in m.match_triple(pattern, store.get(d), State::default()) {
                    solver.solve(&rest, st, &mut out);
                }
            }
        }
        out
    }
}

/// Applies one rule to `kb`: the triples of every consequent instance whose
/// antecedent match has not fired before.
pub fn apply_rule(
    rule: &Rule,
    kb: &Formula,
    fired: &mut FiringRecord,
    limits: &EngineLimits,
) -> Result<BTreeSet<Triple>, EngineError> {
    limits.validate()?;
    let ctx = EvalContext::new().with_limits(limits.clone());
    let store = Store::from_formula(kb);
    let mut namer = Namer::for_formula(kb);
    let mut out = BTreeSet::new();
    for b in rule.solve_full(&store, &ctx, limits.builtin_timeout) {
        if !fired.record(rule, &b) {
            continue;
        }
        match instantiate(rule, &b, &mut namer) {
            Ok((triples, _)) => out.extend(triples),
            Err(e) => ctx.diagnostic(e),
        }
        if out.len() > limits.max_triples {
            return Err(EngineError::ClosureIncomplete {
                limit: LimitKind::Triples,
                value: limits.max_triples,
                partial: Box::new(Formula::from_triples(out)),
            });
        }
    }
    Ok(out)
}

// -- closure

/// Deductive closure with a default evaluation context.
pub fn conclusion(f: &Formula, limits: &EngineLimits) -> Result<Formula, EngineError> {
    let ctx = EvalContext::new().with_limits(limits.clone());
    conclusion_with(f, limits, &ctx)
}

/// Deductive closure: `f` together with everything its rules derive,
/// including rules derived along the way.
pub fn conclusion_with(
    f: &Formula,
    limits: &EngineLimits,
    ctx: &EvalContext,
) -> Result<Formula, EngineError> {
    limits.validate()?;
    let mut store = Store::from_formula(f);
    let mut universals: Vec<Arc<str>> = Vec::new();
    let mut namer = Namer::for_formula(f);
    let mut fired = FiringRecord::new();
    let mut rules: Vec<Rule> = Vec::new();
    let mut known: BTreeSet<Triple> = BTreeSet::new();
    let initial = store.len();
    let build = |store: &Store, universals: &[Arc<str>]| {
        let mut out = f.clone();
        out.extend(store.triples().iter().cloned());
        for u in universals {
            out.declare_universal(u);
        }
        out
    };

    let mut discover = |store: &Store, from: usize, rules: &mut Vec<Rule>| {
        for i in from..store.len() {
            let t = store.get(i);
            if !known.insert(t.clone()) {
                continue;
            }
            match Rule::from_triple(t) {
                Some(Ok(r)) => rules.push(r),
                Some(Err(e)) => ctx.diagnostic(e),
                None => {}
            }
        }
    };
    discover(&store, 0, &mut rules);

    let mut evaluated = 0;
    let mut delta = 0..0;
    let mut iteration = 0;
    loop {
        if iteration >= limits.max_iterations {
            return Err(EngineError::ClosureIncomplete {
                limit: LimitKind::Iterations,
                value: limits.max_iterations,
                partial: Box::new(build(&store, &universals)),
            });
        }
        iteration += 1;
        let mut derived = Vec::new();
        for (ri, rule) in rules.iter().enumerate() {
            let matches = if ri >= evaluated {
                rule.solve_full(&store, ctx, limits.builtin_timeout)
            } else if delta.is_empty() {
                Vec::new()
            } else {
                rule.solve_delta(&store, delta.clone(), ctx, limits.builtin_timeout)
            };
            for b in matches {
                if !fired.record(rule, &b) {
                    continue;
                }
                match instantiate(rule, &b, &mut namer) {
                    Ok((triples, declared)) => {
                        derived.extend(triples);
                        universals.extend(declared);
                    }
                    Err(e) => ctx.diagnostic(e),
                }
            }
        }
        evaluated = rules.len();
        let start = store.len();
        for t in derived {
            store.insert(t);
            if store.len() - initial > limits.max_triples {
                return Err(EngineError::ClosureIncomplete {
                    limit: LimitKind::Triples,
                    value: limits.max_triples,
                    partial: Box::new(build(&store, &universals)),
                });
            }
        }
        if store.len() == start {
            return Ok(build(&store, &universals));
        }
        discover(&store, start, &mut rules);
        delta = start..store.len();
    }
}

/// True if the closure of `f` includes `g`.
pub fn supports(f: &Formula, g: &Formula, limits: &EngineLimits) -> Result<bool, EngineError> {
    Ok(includes(&conclusion(f, limits)?, g))
}

pub fn supports_with(
    f: &Formula,
    g: &Formula,
    limits: &EngineLimits,
    ctx: &EvalContext,
) -> Result<bool, EngineError> {
    Ok(includes(&conclusion_with(f, limits, ctx)?, g))
}

/// The consequents the rules of `rules` produce over the closure of `kb`
/// and `rules` together; `kb` itself is not part of the result.
pub fn filter(
    kb: &Formula,
    rules: &Formula,
    limits: &EngineLimits,
) -> Result<Formula, EngineError> {
    let ctx = EvalContext::new().with_limits(limits.clone());
    filter_with(kb, rules, limits, &ctx)
}

pub fn filter_with(
    kb: &Formula,
    rules: &Formula,
    limits: &EngineLimits,
    ctx: &EvalContext,
) -> Result<Formula, EngineError> {
    let all = crate::formula::conjoin([kb, rules]);
    let closure = conclusion_with(&all, limits, ctx)?;
    let (selected, diagnostics) = extract_rules(rules);
    for d in diagnostics {
        ctx.diagnostic(d);
    }
    let store = Store::from_formula(&closure);
    let mut namer = Namer::for_formula(&closure);
    let mut fired = FiringRecord::new();
    let mut out = Formula::new();
    for rule in &selected {
        for b in rule.solve_full(&store, ctx, limits.builtin_timeout) {
            if !fired.record(rule, &b) {
                continue;
            }
            match instantiate(rule, &b, &mut namer) {
                Ok((triples, declared)) => {
                    out.extend(triples);
                    for u in declared {
                        out.declare_universal(&u);
                    }
                }
                Err(e) => ctx.diagnostic(e),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::isomorphic;
    use crate::parser::parse_document;

    const P: &str = "@prefix : <http://example.org/#>.\n\
        @prefix math: <http://www.w3.org/2000/10/swap/math#>.\n\
        @prefix log: <http://www.w3.org/2000/10/swap/log#>.\n";

    fn f(text: &str) -> Formula {
        parse_document(&format!("{P}{text}"), "http://example.org/doc").unwrap()
    }

    fn limits() -> EngineLimits {
        EngineLimits::default()
    }

    #[test]
    fn includes_examples() {
        assert!(includes(&f(":a :b :c . :d :e :f ."), &f(":a :b :c .")));
        assert!(includes(&f(":a :b :c ."), &Formula::new()));
        assert!(!includes(&f(":judy a :Person ."), &f(":judy a :Student .")));
        assert!(not_includes(&Formula::new(), &f(":a :b :c .")));
        let x = f(":a :b [ :c { :d :e [] } ] .");
        assert!(includes(&x, &x));
    }

    #[test]
    fn socrates() {
        let kb = f(":Socrates a :Man . { ?X a :Man } => { ?X a :Mortal } .");
        let c = conclusion(&kb, &limits()).unwrap();
        assert!(includes(&c, &f(":Socrates a :Mortal .")));
        assert_eq!(c.len(), kb.len() + 1);
    }

    #[test]
    fn no_rules_is_a_fixpoint() {
        let kb = f(":a :b :c .");
        assert_eq!(conclusion(&kb, &limits()).unwrap(), kb);
    }

    #[test]
    fn apply_rule_fires_once_per_binding() {
        let kb = f(":Socrates a :Man . { ?X a :Man } => { ?X a [ a :Mortal ] } .");
        let (rules, _) = extract_rules(&kb);
        let mut fired = FiringRecord::new();
        let first = apply_rule(&rules[0], &kb, &mut fired, &limits()).unwrap();
        assert_eq!(first.len(), 2);
        assert!(apply_rule(&rules[0], &kb, &mut fired, &limits())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn builtins_bind_and_check() {
        let kb = f(":p :len 6 . :q :len 7 . { ?P :len ?L . ?L math:notGreaterThan 6 } => { ?P a :Short } .");
        let c = conclusion(&kb, &limits()).unwrap();
        assert!(includes(&c, &f(":p a :Short .")));
        assert!(!includes(&c, &f(":q a :Short .")));
        let kb = f(":x :pair (2 3) . { ?X :pair ?L . ?L math:sum ?S } => { ?X :total ?S } .");
        let c = conclusion(&kb, &limits()).unwrap();
        assert!(includes(&c, &f(":x :total 5 .")));
    }

    #[test]
    fn rules_can_generate_rules() {
        let kb =
            f(":Man a :Kind . :s a :Man . { ?K a :Kind } => { { ?x a ?K } => { ?x a :Thing } } .");
        let c = conclusion(&kb, &limits()).unwrap();
        assert!(includes(&c, &f(":s a :Thing .")));
    }

    #[test]
    fn unbound_consequent_rules_are_inert() {
        let kb = f(":a :p :b . @forAll :y. { ?x :p :b } => { ?x :q :y } .");
        let ctx = EvalContext::pure();
        let c = conclusion_with(&kb, &limits(), &ctx).unwrap();
        assert_eq!(c.len(), kb.len());
        assert!(ctx.diagnostics().iter().any(|d| d.contains("not bound")));
    }

    #[test]
    fn implies_with_variable_sides_is_data() {
        let kb = f("@forAll :a, :b. :a => :b . :x :y :z .");
        assert!(extract_rules(&kb).0.is_empty());
        assert_eq!(conclusion(&kb, &limits()).unwrap().len(), 2);
    }

    #[test]
    fn blank_generating_rule_hits_limit() {
        let kb = f(":a :next [] . { ?x :next ?y } => { ?y :next [] } .");
        let small = EngineLimits {
            max_iterations: 5,
            ..limits()
        };
        match conclusion(&kb, &small) {
            Err(EngineError::ClosureIncomplete {
                limit: LimitKind::Iterations,
                partial,
                ..
            }) => {
                assert!(partial.len() > kb.len());
            }
            other => panic!("{other:?}"),
        }
        let small = EngineLimits {
            max_triples: 3,
            ..limits()
        };
        assert!(matches!(
            conclusion(&kb, &small),
            Err(EngineError::ClosureIncomplete {
                limit: LimitKind::Triples,
                ..
            })
        ));
    }

    #[test]
    fn filter_returns_only_consequents() {
        let kb = f(":Socrates a :Man .");
        let rules = f("{ ?X a :Man } => { ?X a :Mortal } .");
        let out = filter(&kb, &rules, &limits()).unwrap();
        assert!(isomorphic(&out, &f(":Socrates a :Mortal .")));
        assert!(filter(&kb, &Formula::new(), &limits()).unwrap().is_empty());
    }

    #[test]
    fn supports_examples() {
        assert!(supports(&f(":a :b :c ."), &Formula::new(), &limits()).unwrap());
        assert!(!supports(&Formula::new(), &f(":a :b :c ."), &limits()).unwrap());
    }

    #[test]
    fn quoted_antecedent_patterns() {
        let kb = f(":admin a :Administrator . :admin :says { :bob :notpermitted :Register } .\n\
            @forAll :A, :X. { :A a :Administrator . :A :says { :X :notpermitted :Register } } => { :X :notpermitted :Register } .");
        let c = conclusion(&kb, &limits()).unwrap();
        assert!(includes(&c, &f(":bob :notpermitted :Register .")));
    }

    #[test]
    fn invalid_limits_are_rejected() {
        let bad = EngineLimits {
            max_iterations: 0,
            ..limits()
        };
        assert!(matches!(
            conclusion(&Formula::new(), &bad),
            Err(EngineError::InvalidLimits(_))
        ));
    }
}
