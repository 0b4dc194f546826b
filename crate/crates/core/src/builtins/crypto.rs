use md5::Md5;
use sha1::{Digest, Sha1};

use super::{string_term, ArgShape, Call, EvalOutcome, Mode, Registry};
use crate::term::{Annotation, Term};
use crate::vocab::CRYPTO;

pub fn md5_hex(input: &str) -> String {
    hex::encode(Md5::digest(input.as_bytes()))
}

pub fn sha1_hex(input: &str) -> String {
    hex::encode(Sha1::digest(input.as_bytes()))
}

fn digest(call: &Call, f: fn(&str) -> String) -> EvalOutcome {
    if call.is_open(call.subject) {
        return call.unbound();
    }
    match call.subject {
        Term::Literal(l) if !matches!(l.annotation(), Annotation::Typed(_)) || l.is_string() => {
            call.unify_object(&string_term(f(l.lexical())))
        }
        other => call.not_evaluable(format!("{other:?} is not a string")),
    }
}

pub(super) fn register(r: &mut Registry) {
    let modes = &[Mode::Check, Mode::ComputeObject];
    let shapes = (ArgShape::String, ArgShape::String);
    r.add(CRYPTO, "md5", modes, shapes, true, |c| digest(c, md5_hex));
    r.add(CRYPTO, "sha1", modes, shapes, true, |c| digest(c, sha1_hex));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digests() {
        assert_eq!(md5_hex(""), "d41d8cd98f00b204e9800998ecf8427e");
        assert_eq!(md5_hex("secret"), "5ebe2294ecd0e0f08eab7690d2a6ee69");
        assert_eq!(sha1_hex(""), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    }
}
