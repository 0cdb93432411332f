//! Document fetching over in-memory maps, directory trees, or HTTP.

mod directory;
#[cfg(feature = "http")]
mod http;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::rdf::{parse_turtle, strip_fragment, Document, TurtleError};

pub use directory::{encode_file_name, DirectorySource, MANIFEST_FILE};
#[cfg(feature = "http")]
pub use http::{HttpSource, DEFAULT_HTTP_TIMEOUT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FetchErrorKind {
    NotFound,
    Timeout,
    Parse,
    RedirectLoop,
    Io,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FetchError {
    pub iri: String,
    pub kind: FetchErrorKind,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parse_error: Option<TurtleError>,
}

impl FetchError {
    pub fn new(iri: impl Into<String>, kind: FetchErrorKind, detail: impl Into<String>) -> Self {
        Self {
            iri: iri.into(),
            kind,
            detail: detail.into(),
            parse_error: None,
        }
    }

    pub fn not_found(iri: impl Into<String>) -> Self {
        Self::new(iri, FetchErrorKind::NotFound, "no such document")
    }

    pub fn parse(iri: impl Into<String>, err: TurtleError) -> Self {
        Self {
            iri: iri.into(),
            kind: FetchErrorKind::Parse,
            detail: err.to_string(),
            parse_error: Some(err),
        }
    }
}

impl fmt::Display for FetchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fetching <{}> failed ({:?}): {}", self.iri, self.kind, self.detail)
    }
}

impl std::error::Error for FetchError {}

pub type FetchResult = Result<Document, FetchError>;

/// A place documents are dereferenced from. Implementations take the IRI
/// with its fragment already removed.
pub trait SourceLayer: Send + Sync {
    fn fetch_document(&self, iri: &str) -> FetchResult;

    /// Fetch `iri`, stripping any fragment first.
    fn fetch(&self, iri: &str) -> FetchResult {
        self.fetch_document(strip_fragment(iri))
    }
}

impl<S: SourceLayer + ?Sized> SourceLayer for Arc<S> {
    fn fetch_document(&self, iri: &str) -> FetchResult {
        (**self).fetch_document(iri)
    }
}

impl<S: SourceLayer + ?Sized> SourceLayer for Box<S> {
    fn fetch_document(&self, iri: &str) -> FetchResult {
        (**self).fetch_document(iri)
    }
}

/// Parse fetched text as Turtle with `iri` as base and source.
pub fn parse_fetched(iri: &str, text: &str) -> FetchResult {
    parse_turtle(text, iri).map_err(|e| FetchError::parse(iri, e))
}

/// Documents held as Turtle text keyed by IRI.
#[derive(Debug, Clone, Default)]
pub struct InMemorySource {
    documents: BTreeMap<String, String>,
}

impl InMemorySource {
    pub fn new(documents: impl IntoIterator<Item = (String, String)>) -> Self {
        Self {
            documents: documents.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, iri: impl Into<String>, turtle: impl Into<String>) {
        self.documents.insert(iri.into(), turtle.into());
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

impl SourceLayer for InMemorySource {
    fn fetch_document(&self, iri: &str) -> FetchResult {
        match self.documents.get(iri) {
            Some(text) => parse_fetched(iri, text),
            None => Err(FetchError::not_found(iri)),
        }
    }
}

/// Memoizes outcomes, errors included. The first completed fetch of an IRI wins.
pub struct CachedSource<S> {
    inner: S,
    cache: RwLock<HashMap<String, FetchResult>>,
    backend_calls: AtomicUsize,
}

impl<S: SourceLayer> CachedSource<S> {
    pub fn backend_calls(&self) -> usize {
        self.backend_calls.load(Ordering::Relaxed)
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

pub fn with_cache<S: SourceLayer>(src: S) -> CachedSource<S> {
    CachedSource {
        inner: src,
        cache: RwLock::new(HashMap::new()),
        backend_calls: AtomicUsize::new(0),
    }
}

impl<S: SourceLayer> SourceLayer for CachedSource<S> {
    fn fetch_document(&self, iri: &str) -> FetchResult {
        if let Some(hit) = self.cache.read().get(iri) {
            return hit.clone();
        }
        self.backend_calls.fetch_add(1, Ordering::Relaxed);
        let outcome = self.inner.fetch_document(iri);
        self.cache.write().entry(iri.to_owned()).or_insert(outcome).clone()
    }
}
