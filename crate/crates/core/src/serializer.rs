//! Deterministic N3 output.
//!
//! Triples are printed in the formula's sort order, grouped by subject with
//! `;` and `,`. Variables are printed as `?x` or `_:x` where the parser's
//! implicit quantification gives back the same scoping, and are otherwise
//! declared explicitly with `@forAll` / `@forSome` on `<urn:n3var:...>`
//! names.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::canon::canonicalize;
use crate::formula::{fresh_name, Formula};
use crate::term::{Annotation, Literal, Term, Triple};
use crate::vocab;

const VAR_NAMESPACE: &str = "urn:n3var:";

#[derive(Debug, Clone)]
pub struct SerializerConfig {
    /// Prefix name to namespace IRI. Only prefixes that are used are printed.
    pub prefixes: BTreeMap<String, String>,
    /// Use `a`, `=`, `=>`, `[ ]`, bare numbers, `@true`/`@false` and `?x`.
    pub use_sugar: bool,
    /// IRIs equal to the base, or the base followed by a fragment, are
    /// printed relative to it.
    pub base: Option<String>,
    /// One triple per line with absolute IRIs and no sugar.
    pub flat: bool,
}

impl Default for SerializerConfig {
    fn default() -> Self {
        SerializerConfig {
            prefixes: BTreeMap::new(),
            use_sugar: true,
            base: None,
            flat: false,
        }
    }
}

impl SerializerConfig {
    pub fn with_prefixes<K: Into<String>, V: Into<String>>(
        prefixes: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        SerializerConfig {
            prefixes: prefixes
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
            ..SerializerConfig::default()
        }
    }

    pub fn flat() -> Self {
        SerializerConfig {
            flat: true,
            use_sugar: false,
            ..SerializerConfig::default()
        }
    }
}

pub fn serialize(f: &Formula, cfg: &SerializerConfig) -> String {
    let mut printer = Printer::new(cfg);
    let body = printer.document(f);
    if body.is_empty() {
        return String::new();
    }
    let mut out = String::new();
    for prefix in &printer.used_prefixes {
        let _ = writeln!(
            out,
            "@prefix {prefix}: <{}> .",
            escape_iri(&cfg.prefixes[prefix])
        );
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}

/// Serialization of the canonical form: byte-identical for isomorphic
/// formulas.
pub fn canonical_text(f: &Formula) -> String {
    serialize(&canonicalize(f), &SerializerConfig::default())
}

pub fn canonical_text_with_prefixes(f: &Formula, prefixes: &BTreeMap<String, String>) -> String {
    let cfg = SerializerConfig {
        prefixes: prefixes.clone(),
        ..SerializerConfig::default()
    };
    serialize(&canonicalize(f), &cfg)
}

#[derive(Clone)]
enum VarStyle {
    Sugar(String),
    Label(String),
    Explicit(String),
}

#[derive(Default)]
struct Scope {
    vars: HashMap<Term, VarStyle>,
    labels: HashMap<Term, String>,
    inline: HashMap<Term, Vec<Triple>>,
}

struct Printer<'c> {
    cfg: &'c SerializerConfig,
    sugar: bool,
    used_prefixes: BTreeSet<String>,
    taken: BTreeSet<String>,
    blank_counter: usize,
    scopes: Vec<Scope>,
}

impl<'c> Printer<'c> {
    fn new(cfg: &'c SerializerConfig) -> Self {
        Printer {
            cfg,
            sugar: cfg.use_sugar && !cfg.flat,
            used_prefixes: BTreeSet::new(),
            taken: BTreeSet::new(),
            blank_counter: 0,
            scopes: Vec::new(),
        }
    }

    fn document(&mut self, f: &Formula) -> String {
        let statements = self.statements(f, 0);
        let mut out = String::new();
        for s in statements {
            out.push_str(&s);
            out.push_str(" .\n");
        }
        out
    }

    fn statements(&mut self, f: &Formula, depth: usize) -> Vec<String> {
        let mut scope = Scope::default();
        let mut universals: Vec<Term> = f
            .universals()
            .iter()
            .map(|n| Term::UniVar(n.clone()))
            .collect();
        let mut existentials: Vec<Term> = f
            .existentials()
            .iter()
            .map(|n| Term::ExiVar(n.clone()))
            .collect();
        if depth == 0 {
            // Undeclared variables are taken to be quantified at the top.
            for v in f.free_variables() {
                match v {
                    Term::UniVar(_) => universals.push(v),
                    Term::ExiVar(_) => existentials.push(v),
                    _ => {}
                }
            }
        }
        let mut explicit_universals = Vec::new();
        let mut explicit_existentials = Vec::new();
        for var in universals {
            let depths = occurrence_depths(f, &var);
            let name = self.allocate(var_base(&var));
            let sugared = self.sugar
                && !depths.is_empty()
                && depths
                    .iter()
                    .all(|&d| if depth == 0 { d <= 1 } else { d == 1 });
            let style = if sugared {
                VarStyle::Sugar(name)
            } else {
                explicit_universals.push(name.clone());
                VarStyle::Explicit(name)
            };
            scope.vars.insert(var, style);
        }
        for var in existentials {
            let depths = occurrence_depths(f, &var);
            let name = self.allocate(var_base(&var));
            let style = if self.sugar && !depths.is_empty() && depths.iter().all(|&d| d == 0) {
                VarStyle::Label(name)
            } else {
                explicit_existentials.push(name.clone());
                VarStyle::Explicit(name)
            };
            scope.vars.insert(var, style);
        }

        let inline = if self.sugar {
            inline_blanks(f)
        } else {
            BTreeSet::new()
        };
        for t in f.triples() {
            if inline.contains(&t.subject) {
                scope
                    .inline
                    .entry(t.subject.clone())
                    .or_default()
                    .push(t.clone());
            }
        }
        for b in &inline {
            scope.inline.entry(b.clone()).or_default();
        }
        self.scopes.push(scope);

        let mut out = Vec::new();
        for (keyword, names) in [
            ("@forAll", &explicit_universals),
            ("@forSome", &explicit_existentials),
        ] {
            if !names.is_empty() {
                let list: Vec<String> = names
                    .iter()
                    .map(|n| format!("<{VAR_NAMESPACE}{n}>"))
                    .collect();
                out.push(format!("{keyword} {}", list.join(", ")));
            }
        }

        if self.cfg.flat {
            for t in f.triples() {
                let s = self.term(&t.subject);
                let p = self.predicate(&t.predicate);
                let o = self.term(&t.object);
                out.push(format!("{s} {p} {o}"));
            }
        } else {
            let triples: Vec<&Triple> = f.triples().collect();
            let mut i = 0;
            while i < triples.len() {
                let subject = &triples[i].subject;
                let mut j = i;
                while j < triples.len() && &triples[j].subject == subject {
                    j += 1;
                }
                if !self.current().inline.contains_key(subject) {
                    let s = self.term(subject);
                    let separator = if depth == 0 { " ;\n    " } else { " ; " };
                    let props = self.property_list(&triples[i..j], separator);
                    out.push(format!("{s} {props}"));
                }
                i = j;
            }
        }
        self.scopes.pop();
        out
    }

    fn current(&self) -> &Scope {
        self.scopes.last().expect("scope")
    }

    fn property_list(&mut self, triples: &[&Triple], separator: &str) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < triples.len() {
            if i > 0 {
                out.push_str(separator);
            }
            let predicate = &triples[i].predicate;
            out.push_str(&self.predicate(predicate));
            out.push(' ');
            let mut first = true;
            while i < triples.len() && &triples[i].predicate == predicate {
                if !first {
                    out.push_str(", ");
                }
                first = false;
                let o = self.term(&triples[i].object);
                out.push_str(&o);
                i += 1;
            }
        }
        out
    }

    fn predicate(&mut self, p: &Term) -> String {
        if self.sugar {
            if let Term::Iri(iri) = p {
                match iri.as_str() {
                    vocab::RDF_TYPE => return "a".to_string(),
                    vocab::OWL_SAME_AS => return "=".to_string(),
                    vocab::LOG_IMPLIES => return "=>".to_string(),
                    _ => {}
                }
            }
        }
        self.term(p)
    }

    fn term(&mut self, t: &Term) -> String {
        match t {
            Term::Iri(iri) => self.iri(iri.as_str()),
            Term::Literal(lit) => self.literal(lit),
            Term::Blank(_) => {
                if let Some(props) = self.current().inline.get(t).cloned() {
                    if props.is_empty() {
                        return "[ ]".to_string();
                    }
                    let refs: Vec<&Triple> = props.iter().collect();
                    return format!("[ {} ]", self.property_list(&refs, " ; "));
                }
                if let Some(label) = self.current().labels.get(t) {
                    return format!("_:{label}");
                }
                let label = loop {
                    let candidate = format!("b{}", self.blank_counter);
                    self.blank_counter += 1;
                    if self.taken.insert(candidate.clone()) {
                        break candidate;
                    }
                };
                self.scopes
                    .last_mut()
                    .expect("scope")
                    .labels
                    .insert(t.clone(), label.clone());
                format!("_:{label}")
            }
            Term::UniVar(name) | Term::ExiVar(name) => {
                let style = self
                    .scopes
                    .iter()
                    .rev()
                    .find_map(|s| s.vars.get(t))
                    .cloned();
                match style {
                    Some(VarStyle::Sugar(n)) => format!("?{n}"),
                    Some(VarStyle::Label(n)) => format!("_:{n}"),
                    Some(VarStyle::Explicit(n)) => format!("<{VAR_NAMESPACE}{n}>"),
                    None => format!("?{}", sanitize(name)),
                }
            }
            Term::List(items) => {
                if items.is_empty() {
                    return "()".to_string();
                }
                let parts: Vec<String> = items.iter().map(|i| self.term(i)).collect();
                format!("( {} )", parts.join(" "))
            }
            Term::Quoted(q) => {
                let depth = self.scopes.len();
                let statements = self.statements(q.formula(), depth);
                if statements.is_empty() {
                    "{ }".to_string()
                } else {
                    format!("{{ {} }}", statements.join(" . "))
                }
            }
        }
    }

    fn iri(&mut self, iri: &str) -> String {
        if !self.cfg.flat {
            if let Some(base) = &self.cfg.base {
                if iri == base {
                    return "<>".to_string();
                }
                if let Some(fragment) = iri.strip_prefix(base.as_str()) {
                    if fragment.starts_with('#') {
                        return format!("<{}>", escape_iri(fragment));
                    }
                }
            }
            let best = self
                .cfg
                .prefixes
                .iter()
                .filter(|(prefix, ns)| valid_prefix(prefix) && iri.starts_with(ns.as_str()))
                .filter(|(_, ns)| valid_local(&iri[ns.len()..]))
                .max_by_key(|(_, ns)| ns.len());
            if let Some((prefix, ns)) = best {
                let local = &iri[ns.len()..];
                self.used_prefixes.insert(prefix.clone());
                return format!("{prefix}:{local}");
            }
        }
        format!("<{}>", escape_iri(iri))
    }

    fn literal(&mut self, lit: &Literal) -> String {
        let quoted = format!("\"{}\"", escape_string(lit.lexical()));
        match lit.annotation() {
            Annotation::Plain => quoted,
            Annotation::Lang(tag) => format!("{quoted}@{tag}"),
            Annotation::Typed(dt) => {
                if self.sugar && bare_number(dt.as_str(), lit.lexical()) {
                    return lit.lexical().to_string();
                }
                if self.sugar
                    && dt.as_str() == vocab::XSD_BOOLEAN
                    && matches!(lit.lexical(), "true" | "false")
                {
                    return format!("@{}", lit.lexical());
                }
                let dt = self.iri(dt.as_str());
                format!("{quoted}^^{dt}")
            }
        }
    }

    fn allocate(&mut self, base: String) -> String {
        let name = fresh_name(&base, |c| self.taken.contains(c));
        self.taken.insert(name.clone());
        name
    }
}

fn var_base(var: &Term) -> String {
    match var {
        Term::UniVar(n) | Term::ExiVar(n) => sanitize(n),
        _ => "v".to_string(),
    }
}

fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .filter(|c| c.is_alphanumeric() || *c == '_')
        .collect();
    if s.is_empty() {
        "v".to_string()
    } else {
        s
    }
}

/// Nesting depths, relative to `f`, at which `var` occurs free.
fn occurrence_depths(f: &Formula, var: &Term) -> BTreeSet<usize> {
    fn walk_term(t: &Term, var: &Term, depth: usize, out: &mut BTreeSet<usize>) {
        match t {
            x if x == var => {
                out.insert(depth);
            }
            Term::List(items) => items.iter().for_each(|i| walk_term(i, var, depth, out)),
            Term::Quoted(q) if q.free_variables().contains(var) => {
                walk(q.formula(), var, depth + 1, out)
            }
            _ => {}
        }
    }
    fn walk(f: &Formula, var: &Term, depth: usize, out: &mut BTreeSet<usize>) {
        for t in f.triples() {
            for term in t.terms() {
                walk_term(term, var, depth, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, var, 0, &mut out);
    out
}

/// Blank nodes of `f` that can be written as `[ ... ]`: used exactly once,
/// as a direct object, and not part of a cycle of such nodes.
fn inline_blanks(f: &Formula) -> BTreeSet<Term> {
    let mut as_object: BTreeMap<&Term, usize> = BTreeMap::new();
    let mut disqualified: BTreeSet<&Term> = BTreeSet::new();
    let mut parent: BTreeMap<&Term, &Term> = BTreeMap::new();
    fn in_lists<'a>(t: &'a Term, out: &mut BTreeSet<&'a Term>) {
        if let Term::List(items) = t {
            for i in items.iter() {
                if matches!(i, Term::Blank(_)) {
                    out.insert(i);
                }
                in_lists(i, out);
            }
        }
    }
    for t in f.triples() {
        if matches!(t.object, Term::Blank(_)) {
            *as_object.entry(&t.object).or_default() += 1;
            parent.insert(&t.object, &t.subject);
        }
        if matches!(t.predicate, Term::Blank(_)) {
            disqualified.insert(&t.predicate);
        }
        for term in t.terms() {
            in_lists(term, &mut disqualified);
        }
    }
    let mut candidates: BTreeSet<&Term> = as_object
        .iter()
        .filter(|(b, &n)| n == 1 && !disqualified.contains(*b))
        .map(|(b, _)| *b)
        .collect();
    let ordered: Vec<&Term> = candidates.iter().copied().collect();
    for b in ordered {
        let mut seen = BTreeSet::new();
        let mut cur = b;
        loop {
            if !seen.insert(cur) {
                candidates.remove(b);
                break;
            }
            match parent.get(cur) {
                Some(p) if candidates.contains(*p) => cur = p,
                _ => break,
            }
        }
    }
    candidates.into_iter().cloned().collect()
}

fn bare_number(datatype: &str, lexical: &str) -> bool {
    let unsigned = lexical.strip_prefix('-').unwrap_or(lexical);
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let decimal = |s: &str| match s.split_once('.') {
        Some((int, frac)) => (int.is_empty() || digits(int)) && digits(frac),
        None => false,
    };
    match datatype {
        vocab::XSD_INTEGER => digits(unsigned),
        vocab::XSD_DECIMAL => decimal(unsigned),
        vocab::XSD_DOUBLE => match unsigned.split_once(['e', 'E']) {
            Some((mantissa, exp)) => {
                let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
                (digits(mantissa) || decimal(mantissa)) && digits(exp)
            }
            None => false,
        },
        _ => false,
    }
}

fn valid_prefix(prefix: &str) -> bool {
    let mut chars = prefix.chars();
    match chars.next() {
        None => true,
        Some(c) => {
            (c.is_alphabetic() || c == '_')
                && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '-')
        }
    }
}

fn valid_local(local: &str) -> bool {
    if local.starts_with('.') || local.ends_with('.') || local.contains("..") {
        return false;
    }
    local
        .chars()
        .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
}

fn escape_iri(iri: &str) -> String {
    let mut out = String::with_capacity(iri.len());
    for c in iri.chars() {
        match c {
            '<' | '>' | '"' | '\\' | '{' | '}' | '|' | '^' | '`' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c if c.is_whitespace() || c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}
