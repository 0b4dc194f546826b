//! `n3r`: load N3 documents, optionally reason over them, and print the
//! result.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser as _;
use n3logic::builtins::catalog;
use n3logic::parser::Parser;
use n3logic::{
    axioms, canonical_text_with_prefixes, conclusion_with, conjoin, filter_with, serialize, vocab,
    EngineError, EngineLimits, EvalContext, Formula, ParseError, Resolver, ResolverConfig,
    SerializerConfig, Term, WebError,
};

const STDIN_BASE: &str = "file:///dev/stdin";

#[derive(Debug, clap::Parser)]
#[command(name = "n3r", version, about = "Notation3 reasoner")]
struct Cli {
    /// Documents to load: paths, IRIs, or `-` for standard input.
    inputs: Vec<String>,

    /// Extra arguments visible to os:argv after the inputs.
    #[arg(last = true)]
    args: Vec<String>,

    /// Replace the knowledge base by its deductive closure.
    #[arg(long)]
    think: bool,

    /// Output only what the rules in RULEDOC conclude.
    #[arg(long, value_name = "RULEDOC")]
    filter: Option<String>,

    /// Drop rules and variable declarations from the output.
    #[arg(long)]
    data: bool,

    /// One triple per line, no abbreviations.
    #[arg(long)]
    flat: bool,

    /// Canonical blank node and variable labels.
    #[arg(long)]
    canonical: bool,

    /// N3 file whose @prefix declarations are used for output.
    #[arg(long, value_name = "FILE")]
    prefixes: Option<PathBuf>,

    /// Never touch the network; use fixtures and the cache only.
    #[arg(long)]
    no_network: bool,

    /// Fixture map: `iri-prefix<TAB>path` per line.
    #[arg(long, value_name = "FILE")]
    fixtures: Option<PathBuf>,

    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    #[arg(long, value_name = "N")]
    max_steps: Option<usize>,

    #[arg(long, value_name = "N")]
    max_triples: Option<usize>,

    /// Add RDFS domain, range and subclass rules.
    #[arg(long)]
    with_rdfs: bool,

    /// Add list first/rest axioms.
    #[arg(long)]
    with_lists: bool,

    /// Add owl:sameAs equality rules.
    #[arg(long)]
    with_sameas: bool,

    /// Base IRI for standard input.
    #[arg(long, value_name = "IRI")]
    base: Option<String>,

    /// List builtins and bundled rule sets.
    #[arg(long)]
    catalog: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Limit(EngineError, Option<String>),
    Fetch(WebError),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Limit(..) => 3,
            Failure::Fetch(_) => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print(&out);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            match &failure {
                Failure::Usage(m) | Failure::Parse(m) => eprintln!("n3r: {m}"),
                Failure::Fetch(e) => eprintln!("n3r: {e}"),
                Failure::Limit(e, partial) => {
                    eprintln!("n3r: {e}; printing partial result");
                    if let Some(p) = partial {
                        print(p);
                    }
                }
            }
            ExitCode::from(failure.code())
        }
    }
}

fn print(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

struct Loaded {
    formula: Formula,
    prefixes: BTreeMap<String, String>,
    base: String,
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if cli.catalog {
        let mut out = catalog();
        for iri in [axioms::RDFS_IRI, axioms::LISTS_IRI, axioms::SAMEAS_IRI] {
            out.push_str(&format!("axioms\t{iri}\n"));
        }
        return Ok(out);
    }
    if cli.inputs.is_empty() {
        return Err(Failure::Usage(
            "no input documents (use - for standard input)".into(),
        ));
    }
    if cli.inputs.iter().filter(|i| *i == "-").count() > 1 {
        return Err(Failure::Usage(
            "standard input can only be read once".into(),
        ));
    }

    let limits = EngineLimits {
        max_iterations: cli
            .max_steps
            .unwrap_or(EngineLimits::default().max_iterations),
        max_triples: cli
            .max_triples
            .unwrap_or(EngineLimits::default().max_triples),
        network_allowed: !cli.no_network,
        ..EngineLimits::default()
    };
    limits
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let mut config = if cli.no_network {
        ResolverConfig::offline()
    } else {
        ResolverConfig::default()
    };
    config.cache_dir = cli.cache_dir.clone();
    if let Some(map) = &cli.fixtures {
        config.load_fixture_map(map).map_err(Failure::Fetch)?;
    }
    let resolver = Arc::new(Resolver::new(config));

    let mut docs = Vec::new();
    for input in &cli.inputs {
        docs.push(load(input, cli.base.as_deref(), &resolver)?);
    }
    for (flag, iri) in [
        (cli.with_rdfs, axioms::RDFS_IRI),
        (cli.with_lists, axioms::LISTS_IRI),
        (cli.with_sameas, axioms::SAMEAS_IRI),
    ] {
        if flag {
            docs.push(load(iri, None, &resolver)?);
        }
    }

    let mut prefixes: BTreeMap<String, String> = vocab::STANDARD_PREFIXES
        .iter()
        .map(|(p, ns)| (p.to_string(), ns.to_string()))
        .collect();
    // Earlier documents win when two declare the same prefix.
    for doc in docs.iter().rev() {
        prefixes.extend(doc.prefixes.clone());
    }
    if let Some(path) = &cli.prefixes {
        prefixes = load(&path.display().to_string(), None, &resolver)?.prefixes;
    }

    let mut argv = cli.inputs.clone();
    argv.extend(cli.args.iter().cloned());
    let ctx = EvalContext::new()
        .with_resolver(resolver.clone())
        .with_limits(limits.clone())
        .with_argv(argv)
        .with_base(docs[0].base.clone())
        .with_prefixes(prefixes.clone());

    let kb = conjoin(docs.iter().map(|d| &d.formula));
    let result = reason(cli, kb, &limits, &ctx, &resolver);
    for d in ctx.take_diagnostics() {
        eprintln!("n3r: {d}");
    }
    let render = |f: Formula| render(cli, f, &prefixes);
    match result {
        Ok(f) => Ok(render(f)),
        Err(Failure::Limit(e, _)) => {
            let partial = e.partial().cloned().map(render);
            Err(Failure::Limit(e, partial))
        }
        Err(other) => Err(other),
    }
}

fn reason(
    cli: &Cli,
    kb: Formula,
    limits: &EngineLimits,
    ctx: &EvalContext,
    resolver: &Resolver,
) -> Result<Formula, Failure> {
    let limit = |e: EngineError| Failure::Limit(e, None);
    let kb = if cli.think {
        conclusion_with(&kb, limits, ctx).map_err(limit)?
    } else {
        kb
    };
    match &cli.filter {
        Some(doc) => {
            let rules = load(doc, None, resolver)?.formula;
            filter_with(&kb, &rules, limits, ctx).map_err(limit)
        }
        None => Ok(kb),
    }
}

fn render(cli: &Cli, mut f: Formula, prefixes: &BTreeMap<String, String>) -> String {
    if cli.data {
        f = data_only(f);
    }
    if cli.canonical {
        return canonical_text_with_prefixes(&f, prefixes);
    }
    let config = SerializerConfig {
        prefixes: prefixes.clone(),
        flat: cli.flat,
        use_sugar: !cli.flat,
        base: None,
    };
    serialize(&f, &config)
}

/// Rules and statements about variables removed, declarations cleared.
fn data_only(mut f: Formula) -> Formula {
    f.retain(|t| {
        if t.has_predicate(vocab::LOG_IMPLIES) {
            return false;
        }
        let mut has_var = false;
        for term in [&t.subject, &t.predicate, &t.object] {
            term.for_each_free_var(&mut |v: &Term| has_var |= matches!(v, Term::UniVar(_)));
        }
        !has_var
    });
    f.clear_declarations();
    f
}

fn has_scheme(input: &str) -> bool {
    let Some((scheme, _)) = input.split_once(':') else {
        return false;
    };
    scheme.len() > 1
        && scheme
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
}

fn file_iri(path: &Path) -> Result<String, Failure> {
    let absolute = std::path::absolute(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let text = absolute
        .to_string_lossy()
        .replace('%', "%25")
        .replace(' ', "%20");
    Ok(format!("file://{text}"))
}

fn load(input: &str, stdin_base: Option<&str>, resolver: &Resolver) -> Result<Loaded, Failure> {
    let (text, base) = if input == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Usage(format!("cannot read standard input: {e}")))?;
        (text, stdin_base.unwrap_or(STDIN_BASE).to_string())
    } else {
        let iri = if has_scheme(input) {
            input.to_string()
        } else {
            file_iri(Path::new(input))?
        };
        let doc = resolver.dereference(&iri).map_err(Failure::Fetch)?;
        (doc.body, doc.iri)
    };
    let (formula, state) = Parser::new(&text, Some(&base))
        .and_then(Parser::parse_with_state)
        .map_err(|e: ParseError| {
            Failure::Parse(e.display_with_source(&source_name(input, &base)))
        })?;
    Ok(Loaded {
        formula,
        prefixes: state.prefixes,
        base,
    })
}

fn source_name(input: &str, base: &str) -> String {
    if input == "-" {
        base.to_string()
    } else {
        input.to_string()
    }
}
