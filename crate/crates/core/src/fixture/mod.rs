//! Deterministic decentralized social-network fixtures.

mod generate;
mod oracle;
mod queries;
pub mod vocab;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use percent_encoding::percent_decode_str;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::has_scheme;
use crate::source::{encode_file_name, InMemorySource, MANIFEST_FILE};
use crate::sparql::{parse_query, Query, ResultTable};
use crate::traversal::TraversalConfig;

pub use generate::PodLayout;
pub use oracle::{centralized_oracle, centralized_view};
pub use queries::{
    canonical_queries, NamedQuery, FORUMS_A_USER_POSTED, MESSAGES_OF_LIKED_USERS, POSTS_OF_A_USER, QUERY_NAMES,
    TAG_DISTRIBUTION, USER_INFORMATION,
};
pub use vocab::PodStyle;

pub const DEFAULT_BASE: &str = "http://pods.ex/";
pub const FIXTURE_FILE: &str = "fixture.json";
const PODS_FOLDER: &str = "pods";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkConfiguration {
    Base,
    Heterogeneous,
}

impl NetworkConfiguration {
    pub fn name(self) -> &'static str {
        match self {
            NetworkConfiguration::Base => "base",
            NetworkConfiguration::Heterogeneous => "heterogeneous",
        }
    }
}

impl std::str::FromStr for NetworkConfiguration {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(Self::Base),
            "heterogeneous" => Ok(Self::Heterogeneous),
            other => Err(format!("unknown configuration '{other}' (expected base or heterogeneous)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixtureConfig {
    pub pod_count: usize,
    pub posts_per_pod: usize,
    pub likes_per_pod: usize,
    pub tag_vocabulary_size: usize,
    pub variant_fraction: f64,
    pub random_seed: u64,
    pub configuration: NetworkConfiguration,
    pub base: String,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        Self {
            pod_count: 8,
            posts_per_pod: 20,
            likes_per_pod: 10,
            tag_vocabulary_size: 12,
            variant_fraction: 0.5,
            random_seed: 7,
            configuration: NetworkConfiguration::Heterogeneous,
            base: DEFAULT_BASE.to_owned(),
        }
    }
}

impl FixtureConfig {
    pub fn base_network(seed: u64) -> Self {
        Self {
            random_seed: seed,
            configuration: NetworkConfiguration::Base,
            variant_fraction: 0.0,
            ..Self::default()
        }
    }

    pub fn heterogeneous(seed: u64) -> Self {
        Self {
            random_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FixtureError> {
        let bad = |m: &str| Err(FixtureError::InvalidConfig(m.to_owned()));
        if self.pod_count == 0 {
            return bad("podCount must be positive");
        }
        if self.tag_vocabulary_size == 0 {
            return bad("tagVocabularySize must be positive");
        }
        if !(0.0..=1.0).contains(&self.variant_fraction) {
            return bad("variantFraction must lie in [0, 1]");
        }
        if !has_scheme(&self.base) || !self.base.ends_with('/') {
            return bad("base must be an absolute IRI ending in '/'");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("invalid fixture configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed fixture file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("unknown query '{0}'")]
    UnknownQuery(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResults {
    pub on: ResultTable,
    pub off: ResultTable,
}

/// Documents, queries, seeds and expected answers of one generated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixtureSet {
    pub config: FixtureConfig,
    pub pod_styles: Vec<PodStyle>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub documents: BTreeMap<String, String>,
    pub queries: Vec<NamedQuery>,
    pub oracle_results: BTreeMap<String, OracleResults>,
    pub rule_set_documents: Vec<String>,
    pub skip_namespaces: Vec<String>,
}

pub fn generate(cfg: &FixtureConfig) -> Result<FixtureSet, FixtureError> {
    cfg.validate()?;
    let generated = generate::generate_documents(cfg);
    let mut fx = FixtureSet {
        config: cfg.clone(),
        pod_styles: generated.layout.styles.clone(),
        documents: generated.documents,
        queries: canonical_queries(&generated.layout),
        oracle_results: BTreeMap::new(),
        rule_set_documents: generated.rule_set_documents,
        skip_namespaces: vocab::vocabulary_namespaces(),
    };
    fx.recompute_oracles();
    Ok(fx)
}

impl FixtureSet {
    pub fn base(&self) -> &str {
        &self.config.base
    }

    pub fn layout(&self) -> PodLayout {
        PodLayout {
            base: self.config.base.clone(),
            styles: self.pod_styles.clone(),
            forum_count: (self.config.pod_count / 2).max(2),
        }
    }

    pub fn query(&self, name: &str) -> Result<&NamedQuery, FixtureError> {
        self.queries
            .iter()
            .find(|q| q.name == name)
            .ok_or_else(|| FixtureError::UnknownQuery(name.to_owned()))
    }

    pub fn parsed_query(&self, name: &str) -> Result<Query, FixtureError> {
        let q = self.query(name)?;
        Ok(parse_query(&q.text).expect("canonical queries parse"))
    }

    pub fn oracle(&self, name: &str, alignment: bool) -> Option<&ResultTable> {
        self.oracle_results.get(name).map(|r| if alignment { &r.on } else { &r.off })
    }

    /// Recompute the embedded oracle answers from the documents.
    pub fn recompute_oracles(&mut self) {
        let on = centralized_view(self, true);
        let off = centralized_view(self, false);
        self.oracle_results = self
            .queries
            .iter()
            .map(|q| {
                let parsed = parse_query(&q.text).expect("canonical queries parse");
                let results = OracleResults {
                    on: crate::sparql::evaluate(&parsed, &on),
                    off: crate::sparql::evaluate(&parsed, &off),
                };
                (q.name.clone(), results)
            })
            .collect();
    }

    /// Move every document under `new_base`, e.g. to host the network on a server.
    pub fn rebase(&self, new_base: &str) -> FixtureSet {
        let old = self.config.base.as_str();
        let swap = |s: &str| s.replace(old, new_base);
        let mut fx = FixtureSet {
            config: FixtureConfig {
                base: new_base.to_owned(),
                ..self.config.clone()
            },
            pod_styles: self.pod_styles.clone(),
            documents: self.documents.iter().map(|(k, v)| (swap(k), swap(v))).collect(),
            queries: self
                .queries
                .iter()
                .map(|q| NamedQuery {
                    name: q.name.clone(),
                    text: swap(&q.text),
                    seeds: q.seeds.iter().map(|s| swap(s)).collect(),
                })
                .collect(),
            oracle_results: BTreeMap::new(),
            rule_set_documents: self.rule_set_documents.iter().map(|s| swap(s)).collect(),
            skip_namespaces: self.skip_namespaces.clone(),
        };
        fx.recompute_oracles();
        fx
    }

    pub fn source(&self) -> InMemorySource {
        InMemorySource::new(self.documents.clone())
    }

    /// Traversal settings for one named query: its seeds plus the fixture's
    /// vocabulary namespaces in the skip list.
    pub fn traversal_config(&self, name: &str) -> Result<TraversalConfig, FixtureError> {
        let q = self.query(name)?;
        Ok(TraversalConfig::new(q.seeds.clone()).skip_namespaces(self.skip_namespaces.clone()))
    }

    /// Write `manifest.json`, `fixture.json` and one file per document.
    pub fn export_directory(&self, dir: &Path) -> Result<(), FixtureError> {
        let pods = dir.join(PODS_FOLDER);
        fs::create_dir_all(&pods)?;
        for (iri, text) in &self.documents {
            let suffix = iri.strip_prefix(self.base()).expect("documents live under the base");
            fs::write(pods.join(encode_file_name(suffix)), text)?;
        }
        let manifest: BTreeMap<&str, &str> = [(self.base(), PODS_FOLDER)].into_iter().collect();
        fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
        let meta = FixtureSet {
            documents: BTreeMap::new(),
            ..self.clone()
        };
        fs::write(dir.join(FIXTURE_FILE), serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    /// The whole fixture, documents included, as one JSON document.
    pub fn to_bundle(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    pub fn from_bundle(text: &str) -> Result<Self, FixtureError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Load an exported directory or a JSON bundle file.
    pub fn load(path: &Path) -> Result<Self, FixtureError> {
        if !path.is_dir() {
            return Self::from_bundle(&fs::read_to_string(path)?);
        }
        let mut fx: FixtureSet = serde_json::from_str(&fs::read_to_string(path.join(FIXTURE_FILE))?)?;
        let pods = path.join(PODS_FOLDER);
        for entry in fs::read_dir(&pods)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            let Some(encoded) = name.strip_suffix(".ttl") else { continue };
            let suffix = percent_decode_str(encoded).decode_utf8_lossy().into_owned();
            fx.documents.insert(format!("{}{suffix}", fx.config.base), fs::read_to_string(entry.path())?);
        }
        Ok(fx)
    }
}
