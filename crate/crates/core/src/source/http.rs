use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use parking_lot::Mutex;
use reqwest::blocking::Client;
use reqwest::header::ACCEPT;
use reqwest::{redirect, StatusCode};

use super::{parse_fetched, FetchError, FetchErrorKind, FetchResult, SourceLayer};
use crate::rdf::strip_fragment;

pub const DEFAULT_HTTP_TIMEOUT: Duration = Duration::from_millis(10_000);
const MAX_REDIRECTS: usize = 5;

/// Live dereferencing over HTTP. Requests to one host run one at a time.
pub struct HttpSource {
    client: Client,
    host_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl HttpSource {
    pub fn new(timeout: Duration) -> Result<Self, reqwest::Error> {
        let client = Client::builder()
            .timeout(timeout)
            .redirect(redirect::Policy::limited(MAX_REDIRECTS))
            .build()?;
        Ok(Self {
            client,
            host_locks: Mutex::new(HashMap::new()),
        })
    }

    fn host_lock(&self, iri: &str) -> Arc<Mutex<()>> {
        let host = url::Url::parse(iri)
            .ok()
            .map(|u| format!("{}:{}", u.host_str().unwrap_or_default(), u.port_or_known_default().unwrap_or(0)))
            .unwrap_or_default();
        Arc::clone(self.host_locks.lock().entry(host).or_default())
    }

    fn classify(iri: &str, err: reqwest::Error) -> FetchError {
        let kind = if err.is_timeout() {
            FetchErrorKind::Timeout
        } else if err.is_redirect() {
            FetchErrorKind::RedirectLoop
        } else {
            FetchErrorKind::Io
        };
        FetchError::new(iri, kind, err.to_string())
    }
}

impl SourceLayer for HttpSource {
    fn fetch_document(&self, iri: &str) -> FetchResult {
        let lock = self.host_lock(iri);
        let _guard = lock.lock();
        let response = self
            .client
            .get(iri)
            .header(ACCEPT, "text/turtle")
            .send()
            .map_err(|e| Self::classify(iri, e))?;
        let status = response.status();
        if status == StatusCode::NOT_FOUND || status == StatusCode::GONE {
            return Err(FetchError::not_found(iri));
        }
        if !status.is_success() {
            return Err(FetchError::new(iri, FetchErrorKind::Io, format!("HTTP status {status}")));
        }
        let final_iri = strip_fragment(response.url().as_str()).to_owned();
        let text = response.text().map_err(|e| Self::classify(iri, e))?;
        parse_fetched(&final_iri, &text)
    }
}
