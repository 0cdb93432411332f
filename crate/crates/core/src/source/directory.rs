use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use super::{parse_fetched, FetchError, FetchErrorKind, FetchResult, SourceLayer};

pub const MANIFEST_FILE: &str = "manifest.json";

const FILE_NAME: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

/// File name for the IRI suffix below a manifest prefix.
pub fn encode_file_name(suffix: &str) -> String {
    format!("{}.ttl", utf8_percent_encode(suffix, FILE_NAME))
}

/// Documents laid out on disk by a prefix → folder manifest.
#[derive(Debug, Clone)]
pub struct DirectorySource {
    root: PathBuf,
    // Longest prefix first.
    prefixes: Vec<(String, PathBuf)>,
}

impl DirectorySource {
    /// Open a directory holding `manifest.json`.
    pub fn open(root: impl AsRef<Path>) -> io::Result<Self> {
        let root = root.as_ref().to_path_buf();
        let text = fs::read_to_string(root.join(MANIFEST_FILE))?;
        let manifest: BTreeMap<String, String> =
            serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        Ok(Self::from_manifest(root, manifest))
    }

    pub fn from_manifest(root: impl Into<PathBuf>, manifest: BTreeMap<String, String>) -> Self {
        let root = root.into();
        let mut prefixes: Vec<(String, PathBuf)> =
            manifest.into_iter().map(|(prefix, folder)| (prefix, root.join(folder))).collect();
        prefixes.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Self { root, prefixes }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Where the document for `iri` would live.
    pub fn path_for(&self, iri: &str) -> Option<PathBuf> {
        self.prefixes
            .iter()
            .find_map(|(prefix, folder)| iri.strip_prefix(prefix.as_str()).map(|s| folder.join(encode_file_name(s))))
    }
}

impl SourceLayer for DirectorySource {
    fn fetch_document(&self, iri: &str) -> FetchResult {
        let path = self.path_for(iri).ok_or_else(|| FetchError::not_found(iri))?;
        match fs::read_to_string(&path) {
            Ok(text) => parse_fetched(iri, &text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(FetchError::not_found(iri)),
            Err(e) => Err(FetchError::new(iri, FetchErrorKind::Io, format!("{}: {e}", path.display()))),
        }
    }
}
