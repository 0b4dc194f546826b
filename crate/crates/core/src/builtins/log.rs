use super::{string_term, string_value, ArgShape, Call, EvalOutcome, Mode, Registry};
use crate::engine::{conclusion_with, includes_bindings};
use crate::formula::{conjoin, Formula};
use crate::parser::{parse_document, parse_document_without_base};
use crate::serializer::canonical_text_with_prefixes;
use crate::term::{Iri, Term};
use crate::vocab::LOG;

fn ground_formula<'a>(call: &Call, t: &'a Term) -> Result<&'a Formula, EvalOutcome> {
    if call.is_open(t) {
        return Err(call.unbound());
    }
    t.as_formula()
        .ok_or_else(|| call.not_evaluable(format!("{t:?} is not a formula")))
}

fn ground_iri<'a>(call: &Call, t: &'a Term) -> Result<&'a Iri, EvalOutcome> {
    if call.is_open(t) {
        return Err(call.unbound());
    }
    t.as_iri()
        .ok_or_else(|| call.not_evaluable(format!("{t:?} is not an IRI")))
}

fn semantics(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    let iri = match ground_iri(call, call.subject) {
        Ok(i) => i,
        Err(e) => return e,
    };
    match call.ctx.semantics(iri.as_str()) {
        Ok(f) => call.unify_object(&Term::quoted(f)),
        Err(e) => call.fail(e),
    }
}

fn content(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    let iri = match ground_iri(call, call.subject) {
        Ok(i) => i,
        Err(e) => return e,
    };
    match call
        .ctx
        .resolver()
        .dereference_with(iri.as_str(), call.ctx.limits.network_allowed)
    {
        Ok(doc) => call.unify_object(&string_term(doc.body)),
        Err(e) => call.fail(e),
    }
}

fn parsed_as_n3(call: &Call) -> EvalOutcome {
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let Some(text) = string_value(call.subject) else {
        return call.not_evaluable("subject must be a string");
    };
    let parsed = match &call.ctx.base {
        Some(base) => parse_document(text, base),
        None => parse_document_without_base(text),
    };
    match parsed {
        Ok(f) => call.unify_object(&Term::quoted(f)),
        Err(e) => call.fail(format!("parse error at {e}")),
    }
}

fn n3_string(call: &Call) -> EvalOutcome {
    match ground_formula(call, call.subject) {
        Ok(f) => call.unify_object(&string_term(canonical_text_with_prefixes(
            f,
            &call.ctx.prefixes,
        ))),
        Err(e) => e,
    }
}

fn uri(call: &Call) -> EvalOutcome {
    if !call.is_open(call.subject) {
        return match call.subject {
            Term::Iri(i) => call.unify_object(&string_term(i.as_str())),
            other => call.not_evaluable(format!("{other:?} is not an IRI")),
        };
    }
    if !call.is_open(call.object) {
        let Some(s) = string_value(call.object) else {
            return call.not_evaluable("object must be a string");
        };
        return match Iri::new(s) {
            Ok(i) => call.unify(call.subject, &Term::Iri(i)),
            Err(e) => call.fail(e),
        };
    }
    call.unbound()
}

fn includes(call: &Call) -> EvalOutcome {
    let f = match ground_formula(call, call.subject) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let Some(g) = call.object.as_formula() else {
        return call.not_evaluable("object must be a formula");
    };
    EvalOutcome::Satisfied(includes_bindings(f, g, call.vars, usize::MAX))
}

fn not_includes(call: &Call) -> EvalOutcome {
    let f = match ground_formula(call, call.subject) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let Some(g) = call.object.as_formula() else {
        return call.not_evaluable("object must be a formula");
    };
    EvalOutcome::from_bool(includes_bindings(f, g, call.vars, 1).is_empty())
}

fn conjunction(call: &Call) -> EvalOutcome {
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let Some(items) = call.subject.as_list() else {
        return call.not_evaluable("subject must be a list of formulas");
    };
    let mut parts = Vec::new();
    for item in items {
        match item.as_formula() {
            Some(f) => parts.push(f),
            None => return call.not_evaluable(format!("{item:?} is not a formula")),
        }
    }
    call.unify_object(&Term::quoted(conjoin(parts)))
}

fn closure(call: &Call) -> Result<Formula, EvalOutcome> {
    let f = ground_formula(call, call.subject)?;
    conclusion_with(f, &call.ctx.limits, call.ctx).map_err(|e| call.fail(e))
}

fn conclusion(call: &Call) -> EvalOutcome {
    match closure(call) {
        Ok(c) => call.unify_object(&Term::quoted(c)),
        Err(e) => e,
    }
}

fn supports(call: &Call) -> EvalOutcome {
    let Some(g) = call.object.as_formula() else {
        return call.not_evaluable("object must be a formula");
    };
    match closure(call) {
        Ok(c) => EvalOutcome::Satisfied(includes_bindings(&c, g, call.vars, usize::MAX)),
        Err(e) => e,
    }
}

pub(super) fn register(r: &mut Registry) {
    use ArgShape::{Formula as F, FormulaList, Iri as I, String as S};
    let compute = &[Mode::Check, Mode::ComputeObject];
    r.add(LOG, "semantics", compute, (I, F), false, semantics);
    r.add(LOG, "content", compute, (I, S), false, content);
    r.add(LOG, "parsedAsN3", compute, (S, F), true, parsed_as_n3);
    r.add(LOG, "N3String", compute, (F, S), true, n3_string);
    r.add(
        LOG,
        "uri",
        &[Mode::Check, Mode::ComputeObject, Mode::ComputeSubject],
        (I, S),
        true,
        uri,
    );
    r.add(LOG, "includes", compute, (F, F), true, includes);
    r.add(
        LOG,
        "notIncludes",
        &[Mode::Check],
        (F, F),
        true,
        not_includes,
    );
    r.add(
        LOG,
        "conjunction",
        compute,
        (FormulaList, F),
        true,
        conjunction,
    );
    r.add(LOG, "conclusion", compute, (F, F), true, conclusion);
    r.add(LOG, "supports", compute, (F, F), true, supports);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{evaluate, EvalContext};
    use crate::term::Bindings;

    fn eval(local: &str, s: Term, o: Term, ctx: &EvalContext) -> EvalOutcome {
        let p = Iri::new(format!("{LOG}{local}")).unwrap();
        evaluate(&p, &s, &o, &Bindings::new(), ctx)
    }

    fn f(text: &str) -> Formula {
        parse_document(
            &format!("@prefix : <http://example.org/#>.\n{text}"),
            "http://example.org/doc",
        )
        .unwrap()
    }

    #[test]
    fn uri_both_ways() {
        let ctx = EvalContext::pure();
        let iri = Term::iri("http://example.org/").unwrap();
        assert!(eval("uri", iri.clone(), string_term("http://example.org/"), &ctx).is_satisfied());
        let x = Term::universal("X");
        let EvalOutcome::Satisfied(v) =
            eval("uri", x.clone(), string_term("http://example.org/"), &ctx)
        else {
            panic!()
        };
        assert_eq!(v[0].get(&x), Some(&iri));
    }

    #[test]
    fn parsed_as_n3_uses_context_base() {
        let ctx = EvalContext::pure().with_base("http://example.org/doc");
        let x = Term::universal("F");
        let r = eval("parsedAsN3", string_term(" :a :b :c ."), x.clone(), &ctx);
        let EvalOutcome::Satisfied(v) = r else {
            panic!("{r:?}")
        };
        let expected =
            Term::quoted(parse_document("<#a> <#b> <#c> .", "http://example.org/doc").unwrap());
        assert_eq!(v[0].get(&x), Some(&expected));
    }

    #[test]
    fn n3_string_is_canonical() {
        let ctx = EvalContext::pure();
        let s = Term::quoted(f("_:x :p 1 ."));
        let t = Term::quoted(f("_:y :p 1 ."));
        let x = Term::universal("S");
        let a = eval("N3String", s, x.clone(), &ctx);
        let b = eval("N3String", t, x, &ctx);
        assert_eq!(a, b);
    }

    #[test]
    fn includes_binds_open_variables() {
        let ctx = EvalContext::pure();
        let data = Term::quoted(f(":judy :homepage <http://example.org/h> ."));
        let pattern = parse_document(
            "@prefix : <http://example.org/#>. @forAll :H. { :judy :homepage :H } a :Pattern .",
            "http://example.org/doc",
        )
        .unwrap();
        let g = pattern.triples().next().unwrap().subject.clone();
        let r = eval("includes", data.clone(), g.clone(), &ctx);
        let EvalOutcome::Satisfied(v) = r else {
            panic!("{r:?}")
        };
        assert_eq!(v.len(), 1);
        assert_eq!(
            v[0].get(&Term::universal("H")),
            Some(&Term::iri("http://example.org/h").unwrap())
        );
        assert_eq!(eval("notIncludes", data, g, &ctx), EvalOutcome::Unsatisfied);
    }

    #[test]
    fn conjunction_keeps_blank_nodes_apart() {
        let ctx = EvalContext::pure();
        let a = Term::quoted(f("[ :p 1 ] ."));
        let x = Term::universal("C");
        let EvalOutcome::Satisfied(v) =
            eval("conjunction", Term::list([a.clone(), a]), x.clone(), &ctx)
        else {
            panic!()
        };
        assert_eq!(v[0].get(&x).unwrap().as_formula().unwrap().len(), 2);
    }

    #[test]
    fn conclusion_and_supports() {
        let ctx = EvalContext::pure();
        let kb = Term::quoted(f(":s a :Man . { ?x a :Man } => { ?x a :Mortal } ."));
        let goal = Term::quoted(f(":s a :Mortal ."));
        assert!(eval("supports", kb.clone(), goal.clone(), &ctx).is_satisfied());
        let x = Term::universal("C");
        let EvalOutcome::Satisfied(v) = eval("conclusion", kb, x.clone(), &ctx) else {
            panic!()
        };
        let c = v[0].get(&x).unwrap();
        assert!(eval("includes", c.clone(), goal, &ctx).is_satisfied());
    }
}
