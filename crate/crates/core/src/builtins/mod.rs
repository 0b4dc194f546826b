//! Built-in predicates: triples whose truth is calculated rather than looked
//! up.
//!
//! Each builtin receives its subject and object with the current bindings
//! applied, plus the set of still-unbound pattern variables, and answers with
//! an [`EvalOutcome`] carrying only the new bindings it introduces.

mod crypto;
mod list;
mod log;
mod math;
mod os;
mod string;
mod time;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use chrono::{DateTime, FixedOffset};

use crate::engine::matcher::{Matcher, State};
use crate::engine::EngineLimits;
use crate::formula::{substitute_term, Formula};
use crate::term::{Bindings, Iri, Literal, Term, Triple};
use crate::vocab;
use crate::web::Resolver;

pub use crypto::{md5_hex, sha1_hex};
pub use math::Number;
pub use time::parse_date_time;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    /// One entry per solution; each holds the bindings the builtin adds.
    Satisfied(Vec<Bindings>),
    Unsatisfied,
    NotEvaluable(String),
}

impl EvalOutcome {
    pub fn yes() -> Self {
        EvalOutcome::Satisfied(vec![Bindings::new()])
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            EvalOutcome::yes()
        } else {
            EvalOutcome::Unsatisfied
        }
    }

    pub fn is_satisfied(&self) -> bool {
        matches!(self, EvalOutcome::Satisfied(v) if !v.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    /// Subject and object both ground.
    Check,
    /// Subject ground; the object is computed.
    ComputeObject,
    /// Object ground; the subject is computed.
    ComputeSubject,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Check => "check",
            Mode::ComputeObject => "compute-object",
            Mode::ComputeSubject => "compute-subject",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgShape {
    Any,
    Number,
    String,
    Iri,
    DateTime,
    List,
    NumberList,
    StringList,
    Formula,
    FormulaList,
}

impl ArgShape {
    pub fn name(self) -> &'static str {
        match self {
            ArgShape::Any => "any",
            ArgShape::Number => "number",
            ArgShape::String => "string",
            ArgShape::Iri => "iri",
            ArgShape::DateTime => "dateTime",
            ArgShape::List => "list",
            ArgShape::NumberList => "list(number)",
            ArgShape::StringList => "list(string)",
            ArgShape::Formula => "formula",
            ArgShape::FormulaList => "list(formula)",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuiltinSignature {
    pub iri: String,
    pub modes: Vec<Mode>,
    pub subject: ArgShape,
    pub object: ArgShape,
    /// Pure builtins depend only on their arguments.
    pub pure: bool,
}

pub type EvalFn = fn(&Call) -> EvalOutcome;

pub struct Builtin {
    pub signature: BuiltinSignature,
    eval: EvalFn,
}

/// The arguments of one builtin evaluation.
pub struct Call<'a> {
    pub predicate: &'a str,
    pub subject: &'a Term,
    pub object: &'a Term,
    /// Pattern variables that are still unbound.
    pub vars: &'a BTreeSet<Term>,
    pub ctx: &'a EvalContext,
}

impl Call<'_> {
    /// True if the term still contains an unbound variable.
    pub fn is_open(&self, t: &Term) -> bool {
        Matcher { vars: self.vars }.has_unbound(t, &Bindings::new())
    }

    /// Matches a computed value against an argument, binding any open
    /// variables in it. Numeric literals compare by value.
    pub fn unify(&self, pattern: &Term, value: &Term) -> EvalOutcome {
        if let (Some(a), Some(b)) = (Number::from_term(pattern), Number::from_term(value)) {
            return EvalOutcome::from_bool(a.value_eq(&b));
        }
        let states = Matcher { vars: self.vars }.match_terms(pattern, value, State::default());
        if states.is_empty() {
            EvalOutcome::Unsatisfied
        } else {
            EvalOutcome::Satisfied(states.into_iter().map(|s| s.bindings).collect())
        }
    }

    pub fn unify_object(&self, value: &Term) -> EvalOutcome {
        self.unify(self.object, value)
    }

    pub fn not_evaluable(&self, reason: impl std::fmt::Display) -> EvalOutcome {
        EvalOutcome::NotEvaluable(format!("{}: {reason}", short_name(self.predicate)))
    }

    pub fn unbound(&self) -> EvalOutcome {
        self.not_evaluable("arguments not bound")
    }

    /// Records a diagnostic and fails.
    pub fn fail(&self, reason: impl std::fmt::Display) -> EvalOutcome {
        self.ctx
            .diagnostic(format!("{}: {reason}", short_name(self.predicate)));
        EvalOutcome::Unsatisfied
    }

    fn gate(&self) -> Option<EvalOutcome> {
        if self.ctx.allow_impure {
            None
        } else {
            Some(self.not_evaluable("non-pure builtins are disabled in this context"))
        }
    }
}

/// Where the current time comes from.
#[derive(Debug, Clone, Default)]
pub enum Clock {
    #[default]
    System,
    Fixed(DateTime<FixedOffset>),
}

/// Everything builtins may consult besides their arguments.
pub struct EvalContext {
    pub allow_impure: bool,
    pub clock: Clock,
    /// `None` reads the process environment.
    pub environment: Option<BTreeMap<String, String>>,
    /// Positional arguments; `os:argv` is 1-based.
    pub argv: Vec<String>,
    /// Base for `log:parsedAsN3` and `os:baseAbsolute`.
    pub base: Option<String>,
    /// Prefixes used by `log:N3String`.
    pub prefixes: BTreeMap<String, String>,
    pub resolver: Option<Arc<Resolver>>,
    /// Limits for closures computed by `log:conclusion` / `log:supports`.
    pub limits: EngineLimits,
    /// Facts consulted for builtin-namespace predicates with no
    /// implementation.
    pub ground_facts: Formula,
    semantics: Mutex<HashMap<String, Result<Formula, String>>>,
    diagnostics: Mutex<Vec<String>>,
}

impl Default for EvalContext {
    fn default() -> Self {
        EvalContext {
            allow_impure: true,
            clock: Clock::System,
            environment: None,
            argv: Vec::new(),
            base: None,
            prefixes: BTreeMap::new(),
            resolver: None,
            limits: EngineLimits::default(),
            ground_facts: Formula::new(),
            semantics: Mutex::new(HashMap::new()),
            diagnostics: Mutex::new(Vec::new()),
        }
    }
}

impl std::fmt::Debug for EvalContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvalContext")
            .field("allow_impure", &self.allow_impure)
            .field("clock", &self.clock)
            .field("argv", &self.argv)
            .field("base", &self.base)
            .finish_non_exhaustive()
    }
}

impl EvalContext {
    pub fn new() -> Self {
        EvalContext::default()
    }

    /// A context in which only pure builtins evaluate.
    pub fn pure() -> Self {
        EvalContext {
            allow_impure: false,
            ..EvalContext::default()
        }
    }

    pub fn with_clock(mut self, now: DateTime<FixedOffset>) -> Self {
        self.clock = Clock::Fixed(now);
        self
    }

    pub fn with_environment<K: Into<String>, V: Into<String>>(
        mut self,
        vars: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        self.environment = Some(
            vars.into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        );
        self
    }

    pub fn with_argv(mut self, argv: Vec<String>) -> Self {
        self.argv = argv;
        self
    }

    pub fn with_base(mut self, base: impl Into<String>) -> Self {
        self.base = Some(base.into());
        self
    }

    pub fn with_prefixes(mut self, prefixes: BTreeMap<String, String>) -> Self {
        self.prefixes = prefixes;
        self
    }

    pub fn with_resolver(mut self, resolver: Arc<Resolver>) -> Self {
        self.resolver = Some(resolver);
        self
    }

    pub fn with_limits(mut self, limits: EngineLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn now(&self) -> DateTime<FixedOffset> {
        match &self.clock {
            Clock::Fixed(t) => *t,
            Clock::System => chrono::Local::now().fixed_offset(),
        }
    }

    pub fn env_var(&self, name: &str) -> Option<String> {
        match &self.environment {
            Some(map) => map.get(name).cloned(),
            None => std::env::var(name).ok(),
        }
    }

    pub fn diagnostic(&self, message: impl Into<String>) {
        let message = message.into();
        let mut d = self.diagnostics.lock().expect("diagnostics lock");
        if !d.contains(&message) {
            d.push(message);
        }
    }

    pub fn diagnostics(&self) -> Vec<String> {
        self.diagnostics.lock().expect("diagnostics lock").clone()
    }

    pub fn take_diagnostics(&self) -> Vec<String> {
        std::mem::take(&mut *self.diagnostics.lock().expect("diagnostics lock"))
    }

    /// The parsed document at `iri`, fetched once per context.
    pub fn semantics(&self, iri: &str) -> Result<Formula, String> {
        let key = Iri::new_unchecked(iri)
            .without_fragment()
            .as_str()
            .to_string();
        if let Some(r) = self.semantics.lock().expect("memo lock").get(&key) {
            return r.clone();
        }
        let result = match &self.resolver {
            Some(r) => r
                .semantics_with(&key, self.limits.network_allowed)
                .map_err(|e| e.to_string()),
            None => Resolver::default_shared()
                .semantics_with(&key, self.limits.network_allowed)
                .map_err(|e| e.to_string()),
        };
        self.semantics
            .lock()
            .expect("memo lock")
            .insert(key, result.clone());
        result
    }

    fn resolver(&self) -> Arc<Resolver> {
        self.resolver
            .clone()
            .unwrap_or_else(Resolver::default_shared)
    }
}

pub struct Registry {
    builtins: BTreeMap<String, Builtin>,
}

impl Registry {
    /// The registry of all shipped builtins.
    pub fn standard() -> &'static Registry {
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            let mut r = Registry {
                builtins: BTreeMap::new(),
            };
            math::register(&mut r);
            string::register(&mut r);
            list::register(&mut r);
            time::register(&mut r);
            os::register(&mut r);
            crypto::register(&mut r);
            log::register(&mut r);
            r
        })
    }

    pub(crate) fn add(
        &mut self,
        ns: &str,
        local: &str,
        modes: &[Mode],
        shapes: (ArgShape, ArgShape),
        pure: bool,
        eval: EvalFn,
    ) {
        let iri = format!("{ns}{local}");
        let signature = BuiltinSignature {
            iri: iri.clone(),
            modes: modes.to_vec(),
            subject: shapes.0,
            object: shapes.1,
            pure,
        };
        self.builtins.insert(iri, Builtin { signature, eval });
    }

    pub fn get(&self, iri: &str) -> Option<&Builtin> {
        self.builtins.get(iri)
    }

    pub fn signatures(&self) -> impl Iterator<Item = &BuiltinSignature> {
        self.builtins.values().map(|b| &b.signature)
    }
}

impl Builtin {
    /// Evaluates with `subject` and `object` already substituted; `vars` are
    /// the unbound pattern variables.
    pub fn call(
        &self,
        subject: &Term,
        object: &Term,
        vars: &BTreeSet<Term>,
        ctx: &EvalContext,
    ) -> EvalOutcome {
        let call = Call {
            predicate: &self.signature.iri,
            subject,
            object,
            vars,
            ctx,
        };
        (self.eval)(&call)
    }
}

/// Evaluates the builtin `predicate` under bindings `b`. Variables in the
/// arguments that `b` does not bind are treated as unknowns to solve for.
/// Satisfied outcomes carry `b` extended with the solutions.
///
/// Builtin-namespace predicates with no implementation are looked up as
/// ground facts in `ctx.ground_facts`.
pub fn evaluate(
    predicate: &Iri,
    subject: &Term,
    object: &Term,
    b: &Bindings,
    ctx: &EvalContext,
) -> EvalOutcome {
    let s = substitute_term(subject, b);
    let o = substitute_term(object, b);
    let mut vars = BTreeSet::new();
    for t in [&s, &o] {
        collect_variables(t, &mut vars);
    }
    let outcome = match Registry::standard().get(predicate.as_str()) {
        Some(builtin) => builtin.call(&s, &o, &vars, ctx),
        None => {
            let pattern = Formula::from_triples([Triple::new(s, Term::Iri(predicate.clone()), o)]);
            let found = crate::engine::match_with_variables(&pattern, &ctx.ground_facts, &vars);
            if found.is_empty() {
                EvalOutcome::Unsatisfied
            } else {
                EvalOutcome::Satisfied(found)
            }
        }
    };
    match outcome {
        EvalOutcome::Satisfied(list) => EvalOutcome::Satisfied(
            list.into_iter()
                .map(|nb| {
                    let mut out = b.clone();
                    for (k, v) in nb.iter() {
                        out.insert(k.clone(), v.clone());
                    }
                    out
                })
                .collect(),
        ),
        other => other,
    }
}

fn collect_variables(t: &Term, out: &mut BTreeSet<Term>) {
    match t {
        Term::UniVar(_) | Term::ExiVar(_) => {
            out.insert(t.clone());
        }
        Term::List(items) => items.iter().for_each(|i| collect_variables(i, out)),
        Term::Quoted(q) => out.extend(q.free_variables().iter().cloned()),
        _ => {}
    }
}

/// True if `iri` names a registered builtin.
pub fn is_builtin(iri: &str) -> bool {
    Registry::standard().get(iri).is_some()
}

pub(crate) fn short_name(iri: &str) -> String {
    for (prefix, ns) in vocab::STANDARD_PREFIXES {
        if let Some(local) = iri.strip_prefix(ns) {
            return format!("{prefix}:{local}");
        }
    }
    format!("<{iri}>")
}

/// Machine-readable listing of the builtins: one tab-separated line per
/// predicate with its IRI, modes, argument shapes and purity.
pub fn catalog() -> String {
    let mut out = String::new();
    for sig in Registry::standard().signatures() {
        let modes: Vec<&str> = sig.modes.iter().map(|m| m.name()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\tmodes={}\tsubject={}\tobject={}\t{}",
            short_name(&sig.iri),
            sig.iri,
            modes.join(","),
            sig.subject.name(),
            sig.object.name(),
            if sig.pure { "pure" } else { "context" }
        );
    }
    out
}

// -- argument helpers shared by the families

pub(crate) fn string_value(t: &Term) -> Option<&str> {
    match t {
        Term::Literal(l) => Some(l.lexical()),
        _ => None,
    }
}

pub(crate) fn string_term(s: impl AsRef<str>) -> Term {
    Term::Literal(Literal::plain(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{LIST, MATH, STRING};

    fn eval(ns: &str, local: &str, s: Term, o: Term) -> EvalOutcome {
        let p = Iri::new(format!("{ns}{local}")).unwrap();
        evaluate(&p, &s, &o, &Bindings::new(), &EvalContext::pure())
    }

    #[test]
    fn negation_computes_object() {
        let y = Term::universal("Y");
        let r = eval(MATH, "negation", Term::integer(1), y.clone());
        let EvalOutcome::Satisfied(list) = r else {
            panic!("{r:?}")
        };
        assert_eq!(list[0].get(&y), Some(&Term::integer(-1)));
    }

    #[test]
    fn less_than_is_irreflexive() {
        assert_eq!(
            eval(MATH, "lessThan", Term::integer(2), Term::integer(2)),
            EvalOutcome::Unsatisfied
        );
    }

    #[test]
    fn unregistered_builtins_are_ground_facts() {
        let mut ctx = EvalContext::pure();
        let p = Iri::new(format!("{MATH}myfunc")).unwrap();
        let a = Term::iri("http://example.org/#a").unwrap();
        let b = Term::iri("http://example.org/#b").unwrap();
        assert_eq!(
            evaluate(&p, &a, &b, &Bindings::new(), &ctx),
            EvalOutcome::Unsatisfied
        );
        ctx.ground_facts
            .insert(Triple::new(a.clone(), Term::Iri(p.clone()), b.clone()));
        assert!(evaluate(&p, &a, &b, &Bindings::new(), &ctx).is_satisfied());
    }

    #[test]
    fn catalog_is_stable_and_lists_digests() {
        let a = catalog();
        assert_eq!(a, catalog());
        assert!(a.contains("math:notGreaterThan\t"));
        assert!(a.contains("crypto:md5\t"));
        assert!(a.contains("crypto:sha1\t"));
        let line = a
            .lines()
            .find(|l| l.starts_with("math:notGreaterThan"))
            .unwrap();
        assert!(line.contains("modes=check"));
    }

    #[test]
    fn list_in_enumerates() {
        let x = Term::universal("X");
        let r = eval(
            LIST,
            "in",
            x.clone(),
            Term::list([Term::integer(1), Term::integer(2)]),
        );
        let EvalOutcome::Satisfied(list) = r else {
            panic!()
        };
        assert_eq!(list.len(), 2);
        assert_eq!(
            eval(LIST, "in", x, Term::list([])),
            EvalOutcome::Satisfied(vec![])
        );
    }

    #[test]
    fn concatenation() {
        let x = Term::universal("X");
        let r = eval(
            STRING,
            "concatenation",
            Term::list([string_term("a"), string_term("b")]),
            x.clone(),
        );
        let EvalOutcome::Satisfied(list) = r else {
            panic!()
        };
        assert_eq!(list[0].get(&x), Some(&string_term("ab")));
    }
}
