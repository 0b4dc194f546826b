use chrono::{DateTime, Datelike, FixedOffset, NaiveDate, NaiveDateTime, Timelike, Utc};

use super::{string_term, string_value, ArgShape, Call, EvalOutcome, Mode, Registry};
use crate::vocab::TIME;

/// Parses an ISO-8601 date-time. Values without a zone are taken as UTC;
/// bare dates as midnight UTC.
pub fn parse_date_time(s: &str) -> Option<DateTime<FixedOffset>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t);
    }
    for format in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, format) {
            return Some(t.and_utc().fixed_offset());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc().fixed_offset())
}

fn field(call: &Call, extract: fn(&DateTime<FixedOffset>) -> String) -> EvalOutcome {
    if call.is_open(call.subject) {
        return call.unbound();
    }
    let Some(t) = string_value(call.subject).and_then(parse_date_time) else {
        return call.not_evaluable(format!("{:?} is not a dateTime", call.subject));
    };
    call.unify_object(&string_term(extract(&t)))
}

fn gm_time(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    let now = call.ctx.now().with_timezone(&Utc);
    call.unify_object(&string_term(now.format("%Y-%m-%dT%H:%M:%SZ").to_string()))
}

fn local_time(call: &Call) -> EvalOutcome {
    if let Some(e) = call.gate() {
        return e;
    }
    let now = call.ctx.now();
    call.unify_object(&string_term(now.format("%Y-%m-%dT%H:%M:%S%:z").to_string()))
}

pub(super) fn register(r: &mut Registry) {
    let modes = &[Mode::Check, Mode::ComputeObject];
    let shapes = (ArgShape::DateTime, ArgShape::String);
    r.add(TIME, "year", modes, shapes, true, |c| {
        field(c, |t| format!("{:04}", t.year()))
    });
    r.add(TIME, "month", modes, shapes, true, |c| {
        field(c, |t| format!("{:02}", t.month()))
    });
    r.add(TIME, "day", modes, shapes, true, |c| {
        field(c, |t| format!("{:02}", t.day()))
    });
    r.add(TIME, "hour", modes, shapes, true, |c| {
        field(c, |t| format!("{:02}", t.hour()))
    });
    r.add(TIME, "minute", modes, shapes, true, |c| {
        field(c, |t| format!("{:02}", t.minute()))
    });
    r.add(TIME, "second", modes, shapes, true, |c| {
        field(c, |t| format!("{:02}", t.second()))
    });
    r.add(TIME, "dayOfWeek", modes, shapes, true, |c| {
        field(c, |t| t.weekday().num_days_from_sunday().to_string())
    });
    r.add(
        TIME,
        "gmTime",
        &[Mode::ComputeObject],
        (ArgShape::Any, ArgShape::String),
        false,
        gm_time,
    );
    r.add(
        TIME,
        "localTime",
        &[Mode::ComputeObject],
        (ArgShape::Any, ArgShape::String),
        false,
        local_time,
    );
}
