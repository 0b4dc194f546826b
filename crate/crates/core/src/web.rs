//! Dereferencing IRIs: local fixtures, `file:` IRIs, bundled rule sets and
//! HTTP(S), with an optional on-disk cache.

use std::collections::HashMap;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::WebError;
use crate::formula::Formula;
use crate::parser::parse_document;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    /// The IRI that was requested, without fragment.
    pub iri: String,
    /// Where the body actually came from after redirects.
    pub final_iri: String,
    pub media_type: String,
    pub body: String,
    pub retrieved: SystemTime,
}

impl Document {
    pub fn is_n3(&self) -> bool {
        N3_TYPES.contains(&self.media_type.as_str())
    }
}

const N3_TYPES: &[&str] = &[
    "text/n3",
    "text/rdf+n3",
    "application/n3",
    "text/turtle",
    "application/x-turtle",
    "application/turtle",
    "application/n-triples",
];

#[derive(Debug, Clone)]
pub struct ResolverConfig {
    pub network: bool,
    /// IRI prefix and local path, consulted longest prefix first.
    pub fixtures: Vec<(String, PathBuf)>,
    pub cache_dir: Option<PathBuf>,
    pub timeout: Duration,
    /// Media types sent in the Accept header, most preferred first.
    pub accept: Vec<String>,
    /// Cached copies older than this are refetched when the network is
    /// allowed.
    pub cache_ttl: Duration,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        ResolverConfig {
            network: true,
            fixtures: Vec::new(),
            cache_dir: None,
            timeout: Duration::from_secs(20),
            accept: [
                "text/n3",
                "text/turtle",
                "application/n-triples",
                "text/plain;q=0.5",
                "*/*;q=0.1",
            ]
            .map(String::from)
            .to_vec(),
            cache_ttl: Duration::from_secs(3600),
        }
    }
}

impl ResolverConfig {
    pub fn offline() -> Self {
        ResolverConfig {
            network: false,
            ..ResolverConfig::default()
        }
    }

    /// Adds the entries of a fixture map file: one `iri-prefix<TAB>path`
    /// per line, paths relative to the map file. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn load_fixture_map(&mut self, path: &Path) -> Result<(), WebError> {
        let text = std::fs::read_to_string(path).map_err(|source| WebError::Io {
            iri: format!("file://{}", path.display()),
            path: path.display().to_string(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        self.fixtures.extend(parse_fixture_map(&text, dir)?);
        Ok(())
    }
}

pub fn parse_fixture_map(text: &str, dir: &Path) -> Result<Vec<(String, PathBuf)>, WebError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((prefix, local)) = line.split_once('\t') else {
            return Err(WebError::FixtureMap {
                line: i + 1,
                message: "expected IRI prefix, tab, path".into(),
            });
        };
        let (prefix, local) = (prefix.trim(), local.trim());
        if prefix.is_empty() || local.is_empty() {
            return Err(WebError::FixtureMap {
                line: i + 1,
                message: "empty IRI prefix or path".into(),
            });
        }
        out.push((prefix.to_string(), dir.join(local)));
    }
    Ok(out)
}

type Slot = Arc<Mutex<Option<Document>>>;

/// Maps IRIs to documents. Shareable across threads; concurrent requests
/// for one IRI wait for a single retrieval.
#[derive(Debug)]
pub struct Resolver {
    config: ResolverConfig,
    documents: Mutex<HashMap<String, Slot>>,
}

impl Resolver {
    pub fn new(config: ResolverConfig) -> Self {
        let mut config = config;
        config
            .fixtures
            .sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Resolver {
            config,
            documents: Mutex::new(HashMap::new()),
        }
    }

    /// A process-wide resolver with the default configuration.
    pub fn default_shared() -> Arc<Resolver> {
        static SHARED: OnceLock<Arc<Resolver>> = OnceLock::new();
        SHARED
            .get_or_init(|| Arc::new(Resolver::new(ResolverConfig::default())))
            .clone()
    }

    pub fn config(&self) -> &ResolverConfig {
        &self.config
    }

    pub fn dereference(&self, iri: &str) -> Result<Document, WebError> {
        self.dereference_with(iri, self.config.network)
    }

    /// Like [`Resolver::dereference`], with network access further
    /// restricted by `network`.
    pub fn dereference_with(&self, iri: &str, network: bool) -> Result<Document, WebError> {
        let iri = strip_fragment(iri);
        let slot = self
            .documents
            .lock()
            .expect("resolver lock")
            .entry(iri.to_string())
            .or_default()
            .clone();
        let mut guard = slot.lock().expect("document lock");
        if let Some(doc) = guard.as_ref() {
            return Ok(doc.clone());
        }
        let doc = self.retrieve(iri, network && self.config.network)?;
        *guard = Some(doc.clone());
        Ok(doc)
    }

    pub fn semantics(&self, iri: &str) -> Result<Formula, WebError> {
        self.semantics_with(iri, self.config.network)
    }

    /// The formula obtained by parsing the document at `iri`, with the
    /// requested IRI as base.
    pub fn semantics_with(&self, iri: &str, network: bool) -> Result<Formula, WebError> {
        let doc = self.dereference_with(iri, network)?;
        if !doc.is_n3() {
            return Err(WebError::UnsupportedMediaType {
                iri: doc.iri,
                media_type: doc.media_type,
            });
        }
        parse_document(&doc.body, &doc.iri).map_err(|error| WebError::Parse {
            iri: doc.iri.clone(),
            error,
        })
    }

    fn retrieve(&self, iri: &str, network: bool) -> Result<Document, WebError> {
        if let Some(path) = self.fixture_path(iri) {
            return read_file(iri, &path);
        }
        if let Some(rest) = iri.strip_prefix("file://") {
            let path = percent_encoding::percent_decode_str(rest)
                .decode_utf8_lossy()
                .into_owned();
            return read_file(iri, Path::new(&path));
        }
        if let Some(text) = crate::axioms::text(iri) {
            return Ok(Document {
                iri: iri.to_string(),
                final_iri: iri.to_string(),
                media_type: "text/n3".into(),
                body: text.to_string(),
                retrieved: SystemTime::now(),
            });
        }
        if !(iri.starts_with("http://") || iri.starts_with("https://")) {
            return Err(WebError::UnsupportedScheme {
                iri: iri.to_string(),
            });
        }
        let cached = self.read_cache(iri);
        if let Some(doc) = &cached {
            let age = doc.retrieved.elapsed().unwrap_or_default();
            if !network || age <= self.config.cache_ttl {
                return Ok(doc.clone());
            }
        }
        if !network {
            return Err(WebError::Offline {
                iri: iri.to_string(),
            });
        }
        let doc = self.fetch(iri)?;
        self.write_cache(&doc);
        Ok(doc)
    }

    fn fixture_path(&self, iri: &str) -> Option<PathBuf> {
        let (prefix, path) = self
            .config
            .fixtures
            .iter()
            .find(|(p, _)| iri.starts_with(p.as_str()))?;
        let rest = &iri[prefix.len()..];
        Some(if rest.is_empty() {
            path.clone()
        } else {
            path.join(rest.trim_start_matches('/'))
        })
    }

    fn fetch(&self, iri: &str) -> Result<Document, WebError> {
        use ureq::ResponseExt as _;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.config.timeout))
            .max_redirects(5)
            .http_status_as_error(false)
            .build()
            .into();
        let mut response = agent
            .get(iri)
            .header("Accept", self.config.accept.join(", "))
            .call()
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => WebError::Timeout {
                    iri: iri.to_string(),
                },
                other => WebError::Fetch {
                    iri: iri.to_string(),
                    message: other.to_string(),
                },
            })?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(WebError::Status {
                iri: iri.to_string(),
                status,
            });
        }
        let final_iri = response.get_uri().to_string();
        let declared = response
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .map(|v| {
                v.split(';')
                    .next()
                    .unwrap_or("")
                    .trim()
                    .to_ascii_lowercase()
            });
        let mut bytes = Vec::new();
        response
            .body_mut()
            .as_reader()
            .read_to_end(&mut bytes)
            .map_err(|e| WebError::Fetch {
                iri: iri.to_string(),
                message: e.to_string(),
            })?;
        let body = String::from_utf8(bytes).map_err(|_| WebError::Fetch {
            iri: iri.to_string(),
            message: "body is not UTF-8".into(),
        })?;
        let media_type = match declared.as_deref() {
            Some(t) if N3_TYPES.contains(&t) || t == "text/html" => t.to_string(),
            _ => sniff(&body).to_string(),
        };
        Ok(Document {
            iri: iri.to_string(),
            final_iri,
            media_type,
            body,
            retrieved: SystemTime::now(),
        })
    }

    fn cache_paths(&self, iri: &str) -> Option<(PathBuf, PathBuf)> {
        let dir = self.config.cache_dir.as_ref()?;
        let key = hex::encode(Sha256::digest(iri.as_bytes()));
        Some((
            dir.join(format!("{key}.body")),
            dir.join(format!("{key}.meta")),
        ))
    }

    fn read_cache(&self, iri: &str) -> Option<Document> {
        let (body_path, meta_path) = self.cache_paths(iri)?;
        let meta = std::fs::read_to_string(meta_path).ok()?;
        let mut lines = meta.lines();
        if lines.next()? != iri {
            return None;
        }
        let media_type = lines.next()?.to_string();
        let secs: u64 = lines.next()?.parse().ok()?;
        let body = std::fs::read_to_string(body_path).ok()?;
        Some(Document {
            iri: iri.to_string(),
            final_iri: iri.to_string(),
            media_type,
            body,
            retrieved: UNIX_EPOCH + Duration::from_secs(secs),
        })
    }

    /// Best effort: a cache that cannot be written is skipped.
    fn write_cache(&self, doc: &Document) {
        let Some((body_path, meta_path)) = self.cache_paths(&doc.iri) else {
            return;
        };
        let secs = doc
            .retrieved
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default()
            .as_secs();
        let write = || -> std::io::Result<()> {
            if let Some(dir) = body_path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            // Body first, then meta via rename, so a reader never sees meta
            // without its body.
            std::fs::write(&body_path, &doc.body)?;
            let tmp = meta_path.with_extension("meta.tmp");
            std::fs::write(&tmp, format!("{}\n{}\n{}\n", doc.iri, doc.media_type, secs))?;
            std::fs::rename(tmp, &meta_path)
        };
        let _ = write();
    }
}

fn strip_fragment(iri: &str) -> &str {
    iri.split_once('#').map_or(iri, |(base, _)| base)
}

fn read_file(iri: &str, path: &Path) -> Result<Document, WebError> {
    let body = std::fs::read_to_string(path).map_err(|source| WebError::Io {
        iri: iri.to_string(),
        path: path.display().to_string(),
        source,
    })?;
    let media_type = media_type_for(path, &body).to_string();
    Ok(Document {
        iri: iri.to_string(),
        final_iri: iri.to_string(),
        media_type,
        body,
        retrieved: SystemTime::now(),
    })
}

/// Media type from the file extension, falling back to the content.
/// `.rdf` and `.xml` files are only taken as RDF/XML if they look like XML.
pub fn media_type_for(path: &Path, body: &str) -> &'static str {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("n3") => "text/n3",
        Some("ttl") => "text/turtle",
        Some("nt") => "application/n-triples",
        Some("html" | "htm") => "text/html",
        Some("txt") => "text/plain",
        _ => sniff(body),
    }
}

fn sniff(body: &str) -> &'static str {
    let head = body.trim_start_matches('\u{feff}').trim_start();
    if head.starts_with("<?xml") || head.starts_with("<rdf:RDF") {
        "application/rdf+xml"
    } else if head.len() >= 5
        && (head[..5].eq_ignore_ascii_case("<!doc") || head[..5].eq_ignore_ascii_case("<html"))
    {
        "text/html"
    } else {
        "text/n3"
    }
}
