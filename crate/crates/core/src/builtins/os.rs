use super::{string_term, string_value, ArgShape, Call, EvalOutcome, Mode, Registry};
use crate::builtins::Number;
use crate::vocab::OS;

fn argv(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let index = match Number::from_term(call.subject) {
        Some(Number::Integer(i)) => i,
        _ => return call.not_evaluable("subject must be an argument index"),
    };
    match usize::try_from(index)
        .ok()
        .filter(|&i| i >= 1)
        .and_then(|i| call.ctx.argv.get(i - 1))
    {
        Some(arg) => call.unify_object(&string_term(arg)),
        None => EvalOutcome::Unsatisfied,
    }
}

fn environ(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let Some(name) = string_value(call.subject) else {
        return call.not_evaluable("subject must be a variable name");
    };
    match call.ctx.env_var(name) {
        Some(v) => call.unify_object(&string_term(v)),
        None => EvalOutcome::Unsatisfied,
    }
}

fn base_absolute(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let Some(reference) = string_value(call.subject) else {
        return call.not_evaluable("subject must be a string");
    };
    let Some(base) = call.ctx.base.as_deref() else {
        return call.not_evaluable("no base IRI in context");
    };
    match crate::parser::resolve_iri(base, reference) {
        Ok(iri) => call.unify_object(&string_term(iri)),
        Err(e) => call.fail(format!("cannot resolve {reference:?}: {e}")),
    }
}

fn base_relative(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let Some(absolute) = string_value(call.subject) else {
        return call.not_evaluable("subject must be a string");
    };
    let Some(base) = call.ctx.base.as_deref() else {
        return call.not_evaluable("no base IRI in context");
    };
    let dir = &base[..base.rfind('/').map_or(0, |i| i + 1)];
    let relative = if absolute == base {
        String::new()
    } else if let Some(rest) = absolute.strip_prefix(base).filter(|r| r.starts_with('#')) {
        rest.to_string()
    } else if let Some(rest) = absolute.strip_prefix(dir).filter(|_| !dir.is_empty()) {
        rest.to_string()
    } else {
        absolute.to_string()
    };
    call.unify_object(&string_term(relative))
}

pub(super) fn register(r: &mut Registry) {
    let modes = &[Mode::Check, Mode::ComputeObject];
    r.add(
        OS,
        "argv",
        modes,
        (ArgShape::Number, ArgShape::String),
        false,
        argv,
    );
    r.add(
        OS,
        "environ",
        modes,
        (ArgShape::String, ArgShape::String),
        false,
        environ,
    );
    r.add(
        OS,
        "baseAbsolute",
        modes,
        (ArgShape::String, ArgShape::String),
        false,
        base_absolute,
    );
    r.add(
        OS,
        "baseRelative",
        modes,
        (ArgShape::String, ArgShape::String),
        false,
        base_relative,
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{evaluate, EvalContext};
    use crate::term::{Bindings, Iri, Term};

    fn eval(local: &str, s: Term, ctx: &EvalContext) -> EvalOutcome {
        let p = Iri::new(format!("{OS}{local}")).unwrap();
        evaluate(&p, &s, &Term::universal("X"), &Bindings::new(), ctx)
    }

    fn bound(o: EvalOutcome) -> Term {
        match o {
            EvalOutcome::Satisfied(v) => v[0].get(&Term::universal("X")).unwrap().clone(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn environment_is_injected() {
        let ctx = EvalContext::new().with_environment([("HOME", "/tmp")]);
        assert_eq!(
            bound(eval("environ", string_term("HOME"), &ctx)),
            string_term("/tmp")
        );
        assert_eq!(
            eval("environ", string_term("NO_SUCH_VAR_XYZ"), &ctx),
            EvalOutcome::Unsatisfied
        );
    }

    #[test]
    fn argv_is_one_based() {
        let ctx = EvalContext::new().with_argv(vec!["first".into(), "second".into()]);
        assert_eq!(
            bound(eval("argv", string_term("1"), &ctx)),
            string_term("first")
        );
        assert_eq!(
            bound(eval("argv", Term::integer(2), &ctx)),
            string_term("second")
        );
        assert_eq!(
            eval("argv", string_term("3"), &ctx),
            EvalOutcome::Unsatisfied
        );
    }

    #[test]
    fn base_conversions() {
        let ctx = EvalContext::new().with_base("http://example.org/dir/doc.n3");
        assert_eq!(
            bound(eval("baseAbsolute", string_term("other.n3"), &ctx)),
            string_term("http://example.org/dir/other.n3")
        );
        assert_eq!(
            bound(eval(
                "baseRelative",
                string_term("http://example.org/dir/x.n3"),
                &ctx
            )),
            string_term("x.n3")
        );
    }

    #[test]
    fn disabled_in_pure_contexts() {
        assert!(matches!(
            eval("environ", string_term("HOME"), &EvalContext::pure()),
            EvalOutcome::NotEvaluable(_)
        ));
    }
}
