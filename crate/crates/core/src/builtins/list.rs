use super::{ArgShape, Call, EvalOutcome, Mode, Registry};
use crate::vocab::LIST;

fn member(call: &Call) -> EvalOutcome {
    if call.is_open(call.object) {
        return call.unbound();
    }
    let Some(items) = call.object.as_list() else {
        return call.not_evaluable("object must be a list");
    };
    let mut out = Vec::new();
    for item in items {
        if let EvalOutcome::Satisfied(v) = call.unify(call.subject, item) {
            for b in v {
                if !out.contains(&b) {
                    out.push(b);
                }
            }
        }
    }
    EvalOutcome::Satisfied(out)
}

fn last(call: &Call) -> EvalOutcome {
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let Some(items) = call.subject.as_list() else {
        return call.not_evaluable("subject must be a list");
    };
    match items.last() {
        Some(t) => call.unify_object(t),
        None => EvalOutcome::Unsatisfied,
    }
}

pub(super) fn register(r: &mut Registry) {
    r.add(
        LIST,
        "in",
        &[Mode::Check, Mode::ComputeSubject],
        (ArgShape::Any, ArgShape::List),
        true,
        member,
    );
    r.add(
        LIST,
        "last",
        &[Mode::Check, Mode::ComputeObject],
        (ArgShape::List, ArgShape::Any),
        true,
        last,
    );
}
