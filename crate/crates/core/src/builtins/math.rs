use std::cmp::Ordering;

use super::{ArgShape, Call, EvalOutcome, Mode, Registry};
use crate::term::{Iri, Literal, Term};
use crate::vocab::{self, MATH};

/// A numeric literal's value. Integers keep exact values; decimals and
/// doubles are held as `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Integer(i128),
    Decimal(f64),
    Double(f64),
}

impl Number {
    /// Reads typed numeric literals and plain literals with numeric lexical
    /// forms.
    pub fn from_term(t: &Term) -> Option<Number> {
        let Term::Literal(lit) = t else { return None };
        let lexical = lit.lexical().trim();
        match lit.datatype().map(Iri::as_str) {
            Some(vocab::XSD_INTEGER) => parse_integer(lexical),
            Some(vocab::XSD_DECIMAL) => lexical.parse().ok().map(Number::Decimal),
            Some(vocab::XSD_DOUBLE) => parse_double(lexical).map(Number::Double),
            Some(_) => None,
            None if lit.language().is_some() => None,
            None => {
                if let Some(n) = parse_integer(lexical) {
                    Some(n)
                } else if lexical.contains(['e', 'E']) {
                    parse_double(lexical).map(Number::Double)
                } else if lexical.contains('.') {
                    lexical.parse().ok().map(Number::Decimal)
                } else {
                    None
                }
            }
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Number::Integer(i) => i as f64,
            Number::Decimal(d) | Number::Double(d) => d,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Number::Integer(_) => 0,
            Number::Decimal(_) => 1,
            Number::Double(_) => 2,
        }
    }

    pub fn compare(&self, other: &Number) -> Option<Ordering> {
        match (self, other) {
            (Number::Integer(a), Number::Integer(b)) => Some(a.cmp(b)),
            _ => self.as_f64().partial_cmp(&other.as_f64()),
        }
    }

    pub fn value_eq(&self, other: &Number) -> bool {
        self.compare(other) == Some(Ordering::Equal)
    }

    pub fn to_term(self) -> Option<Term> {
        let (lexical, datatype) = match self {
            Number::Integer(i) => (i.to_string(), vocab::XSD_INTEGER),
            Number::Decimal(d) => {
                if !d.is_finite() {
                    return None;
                }
                let s = if d.fract() == 0.0 && d.abs() < 1e15 {
                    format!("{d:.1}")
                } else {
                    format!("{d}")
                };
                (s, vocab::XSD_DECIMAL)
            }
            Number::Double(d) => {
                let s = if d.is_nan() {
                    "NaN".to_string()
                } else if d.is_infinite() {
                    if d > 0.0 { "INF" } else { "-INF" }.to_string()
                } else {
                    format!("{d:e}")
                };
                (s, vocab::XSD_DOUBLE)
            }
        };
        Some(Term::Literal(Literal::typed(
            lexical,
            Iri::new_unchecked(datatype),
        )))
    }
}

fn parse_integer(s: &str) -> Option<Number> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.strip_prefix('+')
        .unwrap_or(s)
        .parse()
        .ok()
        .map(Number::Integer)
}

fn parse_double(s: &str) -> Option<f64> {
    match s {
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

fn widest(a: Number, b: Number) -> u8 {
    a.rank().max(b.rank())
}

fn make(rank: u8, value: f64) -> Number {
    if rank >= 2 {
        Number::Double(value)
    } else {
        Number::Decimal(value)
    }
}

fn number(call: &Call, t: &Term) -> Result<Number, EvalOutcome> {
    if call.is_open(t) {
        return Err(call.unbound());
    }
    Number::from_term(t).ok_or_else(|| call.not_evaluable(format!("{t:?} is not a number")))
}

fn numbers(call: &Call, t: &Term) -> Result<Vec<Number>, EvalOutcome> {
    if call.is_open(t) {
        return Err(call.unbound());
    }
    let Some(items) = t.as_list() else {
        return Err(call.not_evaluable("subject must be a list of numbers"));
    };
    items.iter().map(|i| number(call, i)).collect()
}

fn result(call: &Call, n: Option<Number>) -> EvalOutcome {
    match n.and_then(Number::to_term) {
        Some(t) => call.unify_object(&t),
        None => call.fail("arithmetic overflow or undefined result"),
    }
}

fn compare(call: &Call, accept: fn(Ordering) -> bool) -> EvalOutcome {
    let a = match number(call, call.subject) {
        Ok(n) => n,
        Err(e) => return e,
    };
    let b = match number(call, call.object) {
        Ok(n) => n,
        Err(e) => return e,
    };
    match a.compare(&b) {
        Some(ord) => EvalOutcome::from_bool(accept(ord)),
        None => EvalOutcome::Unsatisfied,
    }
}

fn binary(
    a: Number,
    b: Number,
    int: fn(i128, i128) -> Option<i128>,
    float: fn(f64, f64) -> f64,
) -> Option<Number> {
    match (a, b) {
        (Number::Integer(x), Number::Integer(y)) => int(x, y).map(Number::Integer),
        _ => Some(make(widest(a, b), float(a.as_f64(), b.as_f64()))),
    }
}

fn fold(
    call: &Call,
    unit: i128,
    int: fn(i128, i128) -> Option<i128>,
    float: fn(f64, f64) -> f64,
) -> EvalOutcome {
    let items = match numbers(call, call.subject) {
        Ok(v) => v,
        Err(e) => return e,
    };
    let mut acc = Some(Number::Integer(unit));
    for n in items {
        acc = acc.and_then(|a| binary(a, n, int, float));
    }
    result(call, acc)
}

fn pair(call: &Call) -> Result<(Number, Number), EvalOutcome> {
    let items = numbers(call, call.subject)?;
    match items.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(call.not_evaluable("subject must be a list of two numbers")),
    }
}

fn sum(call: &Call) -> EvalOutcome {
    fold(call, 0, i128::checked_add, |a, b| a + b)
}

fn product(call: &Call) -> EvalOutcome {
    fold(call, 1, i128::checked_mul, |a, b| a * b)
}

fn difference(call: &Call) -> EvalOutcome {
    match pair(call) {
        Ok((a, b)) => result(call, binary(a, b, i128::checked_sub, |a, b| a - b)),
        Err(e) => e,
    }
}

fn quotient(call: &Call) -> EvalOutcome {
    let (a, b) = match pair(call) {
        Ok(p) => p,
        Err(e) => return e,
    };
    if b.as_f64() == 0.0 {
        return call.fail("division by zero");
    }
    result(
        call,
        Some(make(widest(a, b).max(1), a.as_f64() / b.as_f64())),
    )
}

fn negate(n: Number) -> Option<Number> {
    match n {
        Number::Integer(i) => i.checked_neg().map(Number::Integer),
        Number::Decimal(d) => Some(Number::Decimal(-d)),
        Number::Double(d) => Some(Number::Double(-d)),
    }
}

fn negation(call: &Call) -> EvalOutcome {
    if !call.is_open(call.subject) {
        return match number(call, call.subject) {
            Ok(n) => result(call, negate(n)),
            Err(e) => e,
        };
    }
    if !call.is_open(call.object) {
        return match number(call, call.object) {
            Ok(n) => match negate(n).and_then(Number::to_term) {
                Some(t) => call.unify(call.subject, &t),
                None => call.fail("arithmetic overflow"),
            },
            Err(e) => e,
        };
    }
    call.unbound()
}

fn absolute_value(call: &Call) -> EvalOutcome {
    match number(call, call.subject) {
        Ok(n) => {
            let abs = match n {
                Number::Integer(i) => i.checked_abs().map(Number::Integer),
                Number::Decimal(d) => Some(Number::Decimal(d.abs())),
                Number::Double(d) => Some(Number::Double(d.abs())),
            };
            result(call, abs)
        }
        Err(e) => e,
    }
}

fn cos(call: &Call) -> EvalOutcome {
    match number(call, call.subject) {
        Ok(n) => result(call, Some(Number::Double(n.as_f64().cos()))),
        Err(e) => e,
    }
}

pub(super) fn register(r: &mut Registry) {
    use ArgShape::{Number as N, NumberList as NL};
    let check = &[Mode::Check];
    let compute = &[Mode::Check, Mode::ComputeObject];
    r.add(MATH, "lessThan", check, (N, N), true, |c| {
        compare(c, Ordering::is_lt)
    });
    r.add(MATH, "greaterThan", check, (N, N), true, |c| {
        compare(c, Ordering::is_gt)
    });
    r.add(MATH, "notGreaterThan", check, (N, N), true, |c| {
        compare(c, Ordering::is_le)
    });
    r.add(MATH, "notLessThan", check, (N, N), true, |c| {
        compare(c, Ordering::is_ge)
    });
    r.add(MATH, "equalTo", check, (N, N), true, |c| {
        compare(c, Ordering::is_eq)
    });
    r.add(MATH, "notEqualTo", check, (N, N), true, |c| {
        compare(c, Ordering::is_ne)
    });
    r.add(MATH, "sum", compute, (NL, N), true, sum);
    r.add(MATH, "difference", compute, (NL, N), true, difference);
    r.add(MATH, "product", compute, (NL, N), true, product);
    r.add(MATH, "quotient", compute, (NL, N), true, quotient);
    r.add(
        MATH,
        "negation",
        &[Mode::Check, Mode::ComputeObject, Mode::ComputeSubject],
        (N, N),
        true,
        negation,
    );
    r.add(MATH, "absoluteValue", compute, (N, N), true, absolute_value);
    r.add(MATH, "cos", compute, (N, N), true, cos);
}
