use regex::Regex;

use super::{string_term, string_value, ArgShape, Call, EvalOutcome, Mode, Registry};
use crate::term::Term;
use crate::vocab::STRING;

fn text<'a>(call: &Call, t: &'a Term) -> Result<&'a str, EvalOutcome> {
    if call.is_open(t) {
        return Err(call.unbound());
    }
    string_value(t).ok_or_else(|| call.not_evaluable(format!("{t:?} is not a string")))
}

fn check(call: &Call, test: fn(&str, &str) -> bool) -> EvalOutcome {
    let a = match text(call, call.subject) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let b = match text(call, call.object) {
        Ok(s) => s,
        Err(e) => return e,
    };
    EvalOutcome::from_bool(test(a, b))
}

fn compile(call: &Call, pattern: &str, anchored: bool) -> Result<Regex, EvalOutcome> {
    let source = if anchored {
        format!("^(?:{pattern})$")
    } else {
        pattern.to_string()
    };
    Regex::new(&source).map_err(|e| {
        call.ctx.diagnostic(format!(
            "{}: invalid regular expression: {e}",
            super::short_name(call.predicate)
        ));
        call.not_evaluable(format!("invalid regular expression {pattern:?}"))
    })
}

fn matches(call: &Call) -> EvalOutcome {
    let s = match text(call, call.subject) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let p = match text(call, call.object) {
        Ok(s) => s,
        Err(e) => return e,
    };
    match compile(call, p, true) {
        Ok(re) => EvalOutcome::from_bool(re.is_match(s)),
        Err(e) => e,
    }
}

fn list_of_strings<'a>(call: &Call, t: &'a Term) -> Result<Vec<&'a str>, EvalOutcome> {
    if call.is_open(t) {
        return Err(call.unbound());
    }
    let Some(items) = t.as_list() else {
        return Err(call.not_evaluable("subject must be a list of strings"));
    };
    items.iter().map(|i| text(call, i)).collect()
}

fn concatenation(call: &Call) -> EvalOutcome {
    match list_of_strings(call, call.subject) {
        Ok(parts) => call.unify_object(&string_term(parts.concat())),
        Err(e) => e,
    }
}

fn scrape(call: &Call) -> EvalOutcome {
    let args = match list_of_strings(call, call.subject) {
        Ok(a) => a,
        Err(e) => return e,
    };
    let [s, p] = args.as_slice() else {
        return call.not_evaluable("subject must be a list (string pattern)");
    };
    let re = match compile(call, p, false) {
        Ok(re) => re,
        Err(e) => return e,
    };
    match re.captures(s).and_then(|c| c.get(1)) {
        Some(m) => call.unify_object(&string_term(m.as_str())),
        None => EvalOutcome::Unsatisfied,
    }
}

pub(super) fn register(r: &mut Registry) {
    use ArgShape::{String as S, StringList as SL};
    let check_only = &[Mode::Check];
    let compute = &[Mode::Check, Mode::ComputeObject];
    r.add(STRING, "contains", check_only, (S, S), true, |c| {
        check(c, |a, b| a.contains(b))
    });
    r.add(STRING, "startsWith", check_only, (S, S), true, |c| {
        check(c, |a, b| a.starts_with(b))
    });
    r.add(STRING, "endsWith", check_only, (S, S), true, |c| {
        check(c, |a, b| a.ends_with(b))
    });
    r.add(STRING, "equalIgnoringCase", check_only, (S, S), true, |c| {
        check(c, |a, b| a.to_lowercase() == b.to_lowercase())
    });
    r.add(STRING, "matches", check_only, (S, S), true, matches);
    r.add(
        STRING,
        "concatenation",
        compute,
        (SL, S),
        true,
        concatenation,
    );
    r.add(STRING, "scrape", compute, (SL, S), true, scrape);
}
