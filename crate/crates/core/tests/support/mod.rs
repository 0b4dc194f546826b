//! Generators and property checks shared by the property suite and the
//! command-line acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;

use n3logic::builtins::{evaluate, EvalContext};
use n3logic::engine::{conclusion, includes, not_includes, EngineLimits};
use n3logic::formula::substitute_triple;
use n3logic::{
    conjoin, isomorphic, parse_document, serialize, vocab, Bindings, Formula, Iri, Literal,
    SerializerConfig, Term, Triple,
};
use proptest::prelude::*;

pub const BASE: &str = "http://example.org/doc";

pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 256,
        ..ProptestConfig::default()
    }
}

pub fn node(i: usize) -> Term {
    Term::iri(format!("http://example.org/n{i}")).unwrap()
}

pub fn pred(i: usize) -> Term {
    Term::iri(format!("http://example.org/p{i}")).unwrap()
}

pub fn blank(i: usize) -> Term {
    Term::blank(format!("b{i}"))
}

pub fn resource(blanks: usize) -> BoxedStrategy<Term> {
    if blanks == 0 {
        (0..5usize).prop_map(node).boxed()
    } else {
        prop_oneof![3 => (0..5usize).prop_map(node), 2 => (0..blanks).prop_map(blank)].boxed()
    }
}

pub fn object(blanks: usize) -> BoxedStrategy<Term> {
    prop_oneof![
        4 => resource(blanks),
        1 => (-2i64..3).prop_map(Term::integer),
        1 => "[ab\"\\\\\n é]{0,3}".prop_map(Term::string),
    ]
    .boxed()
}

/// Plain RDF graphs: IRIs, literals and up to `blanks` blank nodes.
pub fn graph(blanks: usize, max: usize) -> impl Strategy<Value = Formula> {
    prop::collection::vec(
        (resource(blanks), (0..3usize).prop_map(pred), object(blanks)),
        0..max,
    )
    .prop_map(|ts| Formula::from_triples(ts.into_iter().map(|(s, p, o)| Triple::new(s, p, o))))
}

/// Terms with nested lists, quoted formulas and the variables `x` (universal)
/// and `e` (existential).
pub fn rich_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        4 => object(3),
        1 => Just(Term::universal("x")),
        1 => Just(Term::existential("e")),
        1 => any::<bool>().prop_map(|b| Term::Literal(Literal::boolean(b))),
        1 => "[a-z]{1,4}".prop_map(|l| Term::Literal(Literal::lang("chat", l))),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(Term::list),
            prop::collection::vec((inner.clone(), (0..3usize).prop_map(pred), inner), 1..3)
                .prop_map(|ts| {
                    Term::quoted(Formula::from_triples(
                        ts.into_iter().map(|(s, p, o)| Triple::new(s, p, o)),
                    ))
                }),
        ]
    })
}

pub fn rich_formula() -> impl Strategy<Value = Formula> {
    prop::collection::vec((rich_term(), (0..3usize).prop_map(pred), rich_term()), 0..5).prop_map(
        |ts| {
            let mut f = Formula::from_triples(ts.into_iter().map(|(s, p, o)| Triple::new(s, p, o)));
            let free = f.free_variables();
            if free.contains(&Term::universal("x")) {
                f.declare_universal("x");
            }
            if free.contains(&Term::existential("e")) {
                f.declare_existential("e");
            }
            f
        },
    )
}

/// Renames blank nodes `b{i}` to `r{perm(i)}`.
pub fn rename_blanks(f: &Formula, shift: usize) -> Formula {
    let mut b = Bindings::new();
    for (i, t) in f.blank_nodes().into_iter().enumerate() {
        b.insert(t, Term::blank(format!("r{}", (i + shift) % 97)));
    }
    Formula::from_triples(f.triples().map(|t| substitute_triple(t, &b)))
}

pub fn simple_entails(g: &Formula, h: &Formula) -> bool {
    let blanks: Vec<Term> = h.blank_nodes().into_iter().collect();
    let mut terms: BTreeSet<Term> = BTreeSet::new();
    for t in g.triples() {
        terms.extend(t.terms().into_iter().cloned());
    }
    let terms: Vec<Term> = terms.into_iter().collect();
    if blanks.is_empty() {
        return h.triples().all(|t| g.contains(t));
    }
    if terms.is_empty() {
        return h.is_empty();
    }
    let mut choice = vec![0usize; blanks.len()];
    loop {
        let mut b = Bindings::new();
        for (v, &c) in blanks.iter().zip(&choice) {
            b.insert(v.clone(), terms[c].clone());
        }
        if h.triples().all(|t| g.contains(&substitute_triple(t, &b))) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return false;
            }
            choice[i] += 1;
            if choice[i] < terms.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// A Datalog-style rule `{ a1 . a2 } => { c }` over variables X, Y, Z with
/// every consequent variable occurring in the antecedent.
#[derive(Debug, Clone)]
pub struct RuleSpec {
    pub body: Vec<(usize, usize, usize)>,
    pub head: (usize, usize, usize),
    pub blank_head: bool,
}

pub fn rule_spec() -> impl Strategy<Value = RuleSpec> {
    // Positions: 0..3 are variables, 3..6 are constants.
    let atom = (0..6usize, 0..3usize, 0..6usize);
    (
        prop::collection::vec(atom, 1..3),
        (0..6usize, 0..4usize, 0..6usize),
        any::<bool>(),
    )
        .prop_map(|(body, head, blank_head)| {
            let vars: BTreeSet<usize> = body
                .iter()
                .flat_map(|&(s, _, o)| [s, o])
                .filter(|&v| v < 3)
                .collect();
            let fix = |v: usize| {
                if v < 3 && !vars.contains(&v) {
                    3 + v
                } else {
                    v
                }
            };
            RuleSpec {
                head: (fix(head.0), head.1, fix(head.2)),
                body,
                blank_head,
            }
        })
}

pub fn rule_text(r: &RuleSpec, var_prefix: &str) -> String {
    let term = |v: usize| {
        if v < 3 {
            format!("?{var_prefix}{}", ["X", "Y", "Z"][v])
        } else {
            format!(":n{}", v - 3)
        }
    };
    let body: Vec<String> = r
        .body
        .iter()
        .map(|&(s, p, o)| format!("{} :p{p} {}", term(s), term(o)))
        .collect();
    // Blank-node heads use a predicate no rule body reads, so closures stay
    // finite.
    let head = if r.blank_head {
        format!("{} :out [ :from {} ]", term(r.head.0), term(r.head.2))
    } else {
        format!("{} :p{} {}", term(r.head.0), r.head.1, term(r.head.2))
    };
    format!("{{ {} }} => {{ {head} }} .\n", body.join(" . "))
}

pub fn kb_text(facts: &[(usize, usize, usize)], rules: &[RuleSpec], prefixes: &[String]) -> String {
    let mut text = String::from("@prefix : <http://example.org/> .\n");
    for &(s, p, o) in facts {
        text.push_str(&format!(":n{s} :p{p} :n{o} .\n"));
    }
    for (r, prefix) in rules.iter().zip(prefixes) {
        text.push_str(&rule_text(r, prefix));
    }
    text
}

pub fn facts() -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    prop::collection::vec((0..3usize, 0..3usize, 0..3usize), 0..6)
}

pub fn limits() -> EngineLimits {
    EngineLimits::default()
}

pub fn number_literal() -> impl Strategy<Value = Term> {
    prop_oneof![
        (-20i64..20).prop_map(Term::integer),
        (-20i64..20, 0u32..100).prop_map(|(i, f)| {
            Term::Literal(Literal::typed(
                format!("{i}.{f:02}"),
                Iri::new(vocab::XSD_DECIMAL).unwrap(),
            ))
        }),
        (-20i64..20, 0u32..10).prop_map(|(i, f)| {
            Term::Literal(Literal::typed(
                format!("{i}.{f}e0"),
                Iri::new(vocab::XSD_DOUBLE).unwrap(),
            ))
        }),
    ]
}

pub fn builtin(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).unwrap()
}

pub fn holds(ns: &str, local: &str, s: &Term, o: &Term) -> bool {
    evaluate(
        &builtin(ns, local),
        s,
        o,
        &Bindings::new(),
        &EvalContext::pure(),
    )
    .is_satisfied()
}

pub fn check_round_trip(f: &Formula) -> Result<(), TestCaseError> {
    for cfg in [
        SerializerConfig::default(),
        SerializerConfig {
            flat: true,
            use_sugar: false,
            ..SerializerConfig::default()
        },
    ] {
        let text = serialize(f, &cfg);
        let back =
            parse_document(&text, BASE).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(isomorphic(f, &back), "{}", text);
    }
    Ok(())
}

pub fn check_reflexive(f: &Formula) -> Result<(), TestCaseError> {
    prop_assert!(includes(f, f));
    Ok(())
}

pub fn check_monotonic(f: &Formula, g: &Formula, h: &Formula) -> Result<(), TestCaseError> {
    let bigger = conjoin([f, h]);
    if includes(f, g) {
        prop_assert!(includes(&bigger, g));
    }
    prop_assert!(includes(&bigger, f));
    Ok(())
}

pub fn check_complement(f: &Formula, g: &Formula) -> Result<(), TestCaseError> {
    prop_assert_eq!(not_includes(f, g), !includes(f, g));
    Ok(())
}

pub fn check_simple_entailment(g: &Formula, h: &Formula) -> Result<(), TestCaseError> {
    prop_assert_eq!(includes(g, h), simple_entails(g, h));
    Ok(())
}

pub fn check_idempotent(
    fs: &[(usize, usize, usize)],
    rules: &[RuleSpec],
) -> Result<(), TestCaseError> {
    let prefixes = vec![String::new(); rules.len()];
    let kb = parse_document(&kb_text(fs, rules, &prefixes), BASE).unwrap();
    let once = conclusion(&kb, &limits()).unwrap();
    prop_assert!(includes(&once, &kb));
    let twice = conclusion(&once, &limits()).unwrap();
    if rules.iter().all(|r| !r.blank_head) {
        prop_assert!(isomorphic(&once, &twice));
    } else {
        // Blank-node consequents get fresh labels on each run, so the two
        // closures agree only up to mutual inclusion.
        prop_assert!(includes(&once, &twice) && includes(&twice, &once));
    }
    Ok(())
}

pub fn check_rule_order(
    fs: &[(usize, usize, usize)],
    rules: &[RuleSpec],
    seed: u64,
) -> Result<(), TestCaseError> {
    // Variable names decide where a rule sorts in the knowledge base, so
    // renaming them permutes the order rules are tried in.
    let n = rules.len();
    let forward: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut backward: Vec<String> = (0..n)
        .map(|i| format!("z{}", (i as u64 * 7 + seed) % 97))
        .collect();
    backward.reverse();
    let a = conclusion(
        &parse_document(&kb_text(fs, rules, &forward), BASE).unwrap(),
        &limits(),
    )
    .unwrap();
    let b = conclusion(
        &parse_document(&kb_text(fs, rules, &backward), BASE).unwrap(),
        &limits(),
    )
    .unwrap();
    let data = |f: &Formula| {
        let mut f = f.clone();
        f.retain(|t| !t.has_predicate(vocab::LOG_IMPLIES));
        f.clear_declarations();
        f
    };
    prop_assert!(isomorphic(&data(&a), &data(&b)));
    Ok(())
}

pub fn check_conjoin(a: &Formula, b: &Formula, c: &Formula) -> Result<(), TestCaseError> {
    prop_assert!(isomorphic(&conjoin([a, b]), &conjoin([b, a])));
    let left = conjoin([&conjoin([a, b]), c]);
    let right = conjoin([a, &conjoin([b, c])]);
    prop_assert!(isomorphic(&left, &right));
    prop_assert!(isomorphic(&left, &conjoin([a, b, c])));
    Ok(())
}

pub const CORPUS_PREFIXES: &str = "\
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix s: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix log: <http://www.w3.org/2000/10/swap/log#> .
@prefix math: <http://www.w3.org/2000/10/swap/math#> .
@prefix crypto: <http://www.w3.org/2000/10/swap/crypto#> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
@prefix conf: <http://example.org/conf#> .
@prefix j: <http://example.org/joe-foaf#> .
@prefix b: <http://example.org/b#> .
@prefix mit: <http://example.org/mit#> .
@prefix cmu: <http://example.org/cmu#> .
@prefix school: <http://example.org/school#> .
@prefix policy: <http://example.org/policy#> .
@prefix ex: <http://example.org/ex#> .
@prefix rein: <http://dig.csail.mit.edu/2005/09/rein#> .
@prefix session: <http://redfoot.net/2005/session#> .
@prefix diff: <http://www.w3.org/2004/delta#> .
@prefix : <http://dig.csail.mit.edu/2006/Papers/TPLP/example/exconf#> .
";

pub const CORPUS_BASE: &str = "http://dig.csail.mit.edu/2006/Papers/TPLP/example/doc.n3";

/// Parses one corpus snippet with the shared prefix header.
pub fn load_snippet(dir: &Path, name: &str) -> Result<Formula, String> {
    let text = std::fs::read_to_string(dir.join(name)).map_err(|e| format!("{name}: {e}"))?;
    parse_document(&format!("{CORPUS_PREFIXES}{text}"), CORPUS_BASE)
        .map_err(|e| format!("{name}: {e}"))
}

pub fn snippet_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".n3"))
        .collect();
    names.sort();
    names
}
