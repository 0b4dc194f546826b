mod support;

use n3logic::builtins::{evaluate, EvalContext, EvalOutcome};
use n3logic::engine::includes;
use n3logic::{canonical_text, canonicalize, isomorphic, vocab, Bindings, Formula, Term, Triple};
use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn serializer_round_trip(f in rich_formula()) {
        check_round_trip(&f)?;
    }

    #[test]
    fn canonical_text_ignores_blank_names(f in graph(4, 8), shift in 0usize..50) {
        let g = rename_blanks(&f, shift);
        prop_assert!(isomorphic(&f, &g));
        prop_assert_eq!(canonical_text(&f), canonical_text(&g));
        prop_assert_eq!(canonicalize(&canonicalize(&f)), canonicalize(&f));
    }

    #[test]
    fn includes_is_reflexive(f in rich_formula()) {
        check_reflexive(&f)?;
    }

    #[test]
    fn includes_is_monotonic_in_its_first_argument(f in graph(3, 6), g in graph(3, 4), h in graph(2, 4)) {
        check_monotonic(&f, &g, &h)?;
    }

    #[test]
    fn not_includes_is_the_complement(f in graph(2, 6), g in graph(2, 3)) {
        check_complement(&f, &g)?;
    }

    #[test]
    fn includes_agrees_with_simple_entailment(g in graph(2, 7), h in graph(4, 4)) {
        check_simple_entailment(&g, &h)?;
    }

    #[test]
    fn includes_finds_generalizations(g in graph(1, 6), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        // Replacing some IRIs of a subgraph by blank nodes gives a graph
        // that is always included.
        prop_assume!(!g.is_empty());
        let triples: Vec<&Triple> = g.triples().collect();
        let mut h = Formula::new();
        for (i, pick) in picks.iter().enumerate() {
            let t = *pick.get(&triples);
            let object = if i % 2 == 0 && t.object.as_iri().is_some() { Term::blank(format!("g{i}")) } else { t.object.clone() };
            h.insert(Triple::new(t.subject.clone(), t.predicate.clone(), object));
        }
        prop_assert!(includes(&g, &h));
    }

    #[test]
    fn conclusion_is_idempotent(fs in facts(), rules in prop::collection::vec(rule_spec(), 0..4)) {
        check_idempotent(&fs, &rules)?;
    }

    #[test]
    fn conclusion_ignores_rule_order(fs in facts(), rules in prop::collection::vec(rule_spec(), 1..4), seed in any::<u64>()) {
        check_rule_order(&fs, &rules, seed)?;
    }

    #[test]
    fn conjoin_commutes_and_associates(a in graph(2, 4), b in graph(2, 4), c in graph(2, 4)) {
        check_conjoin(&a, &b, &c)?;
    }

    #[test]
    fn comparisons_are_trichotomous(x in number_literal(), y in number_literal()) {
        let math = vocab::MATH;
        let lt = holds(math, "lessThan", &x, &y);
        let eq = holds(math, "equalTo", &x, &y);
        let gt = holds(math, "greaterThan", &x, &y);
        prop_assert_eq!([lt, eq, gt].iter().filter(|b| **b).count(), 1);
        prop_assert_eq!(holds(math, "notGreaterThan", &x, &y), !gt);
        prop_assert_eq!(holds(math, "notLessThan", &x, &y), !lt);
        prop_assert_eq!(holds(math, "notEqualTo", &x, &y), !eq);
    }

    #[test]
    fn computed_values_check(
        xs in prop::collection::vec(number_literal(), 1..4),
        s in "[a-z ]{0,6}",
        t in "[a-z ]{0,6}",
    ) {
        let ctx = EvalContext::pure();
        let out = Term::universal("OUT");
        let pair = Term::list(xs.iter().take(2).cloned());
        let cases = [
            (vocab::MATH, "sum", Term::list(xs.clone())),
            (vocab::MATH, "product", Term::list(xs.clone())),
            (vocab::MATH, "difference", pair.clone()),
            (vocab::MATH, "negation", xs[0].clone()),
            (vocab::MATH, "absoluteValue", xs[0].clone()),
            (vocab::STRING, "concatenation", Term::list([Term::string(&s), Term::string(&t)])),
            (vocab::CRYPTO, "md5", Term::string(&s)),
            (vocab::CRYPTO, "sha1", Term::string(&t)),
            (vocab::LIST, "last", Term::list(xs.clone())),
        ];
        for (ns, local, subject) in cases {
            let p = builtin(ns, local);
            let first = evaluate(&p, &subject, &out, &Bindings::new(), &ctx);
            // Same arguments, same outcome.
            prop_assert_eq!(&first, &evaluate(&p, &subject, &out, &Bindings::new(), &ctx));
            if local == "difference" && xs.len() < 2 {
                continue;
            }
            let EvalOutcome::Satisfied(solutions) = first else {
                return Err(TestCaseError::fail(format!("{local}: {first:?}")));
            };
            let value = solutions[0].get(&out).unwrap().clone();
            prop_assert!(evaluate(&p, &subject, &value, &Bindings::new(), &ctx).is_satisfied(), "{} {:?}", local, value);
        }
    }

    #[test]
    fn unknown_builtin_namespace_predicates_never_fail(x in number_literal(), y in number_literal(), local in "[a-z]{3,8}") {
        prop_assume!(!n3logic::builtins::is_builtin(&format!("{}{local}", vocab::MATH)));
        let outcome = evaluate(&builtin(vocab::MATH, &format!("zz{local}")), &x, &y, &Bindings::new(), &EvalContext::pure());
        prop_assert!(matches!(outcome, EvalOutcome::Unsatisfied | EvalOutcome::Satisfied(_)));
    }
}

#[test]
fn entailment_oracle_sanity() {
    let p = pred(0);
    let g = Formula::from_triples([Triple::new(node(0), p.clone(), node(1))]);
    let h = Formula::from_triples([Triple::new(blank(0), p.clone(), blank(1))]);
    assert!(simple_entails(&g, &h));
    let h = Formula::from_triples([Triple::new(blank(0), p, blank(0))]);
    assert!(!simple_entails(&g, &h));
}

mod web {
    use n3logic::{isomorphic, Resolver, ResolverConfig};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(super::config())]

        #[test]
        fn fragments_do_not_change_what_is_fetched(n in 0usize..4, fragment in "[A-Za-z0-9_]{0,8}") {
            let dir = tempfile::tempdir().unwrap();
            for i in 0..4 {
                let body = format!("@prefix : <http://example.org/> .\n:doc{i} :p :n{i} .\n");
                std::fs::write(dir.path().join(format!("d{i}.n3")), body).unwrap();
            }
            let mut config = ResolverConfig::offline();
            config.fixtures = vec![("http://fixture.example/".into(), dir.path().to_path_buf())];
            let resolver = Resolver::new(config);
            let plain = format!("http://fixture.example/d{n}.n3");
            let with_fragment = format!("{plain}#{fragment}");
            let a = resolver.semantics(&plain).unwrap();
            let b = resolver.semantics(&with_fragment).unwrap();
            let c = Resolver::new(resolver.config().clone()).semantics(&with_fragment).unwrap();
            prop_assert!(isomorphic(&a, &b));
            prop_assert!(isomorphic(&b, &c));
            prop_assert_eq!(resolver.dereference(&plain).unwrap().body, resolver.dereference(&with_fragment).unwrap().body);
        }
    }
}
