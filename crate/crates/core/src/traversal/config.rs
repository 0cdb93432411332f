use std::collections::BTreeSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::AlignmentRule;
use crate::parallel::Parallelism;
use crate::rdf::has_scheme;
use crate::rdf::vocab::{owl, rdf, rdfs, semmap, xsd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    #[default]
    FollowAll,
    MatchDriven,
}

impl std::str::FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "follow-all" => Ok(Policy::FollowAll),
            "match-driven" => Ok(Policy::MatchDriven),
            other => Err(format!("unknown policy '{other}' (expected follow-all or match-driven)")),
        }
    }
}

pub const DEFAULT_MAX_DOCUMENTS: usize = 1000;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_millis(180_000);
pub const DEFAULT_WORKERS: usize = 4;

/// Namespaces never dereferenced by the general policy.
pub fn default_skip_list() -> BTreeSet<String> {
    [rdf::NS, rdfs::NS, owl::NS, xsd::NS, semmap::NS].into_iter().map(str::to_owned).collect()
}

#[derive(Debug, Clone)]
pub struct TraversalConfig {
    pub seeds: Vec<String>,
    pub policy: Policy,
    pub max_documents: usize,
    pub timeout: Duration,
    pub deterministic: bool,
    pub alignment_enabled: bool,
    pub namespace_skip_list: BTreeSet<String>,
    /// Concurrent fetches in non-deterministic mode.
    pub workers: usize,
    /// Data-parallel alignment of large batches.
    pub parallelism: Parallelism,
    pub issuer_rules: Vec<AlignmentRule>,
}

impl TraversalConfig {
    pub fn new(seeds: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            seeds: seeds.into_iter().map(Into::into).collect(),
            policy: Policy::FollowAll,
            max_documents: DEFAULT_MAX_DOCUMENTS,
            timeout: DEFAULT_TIMEOUT,
            deterministic: false,
            alignment_enabled: true,
            namespace_skip_list: default_skip_list(),
            workers: DEFAULT_WORKERS,
            parallelism: Parallelism::default(),
            issuer_rules: Vec::new(),
        }
    }

    pub fn deterministic(mut self, on: bool) -> Self {
        self.deterministic = on;
        self
    }

    pub fn alignment(mut self, on: bool) -> Self {
        self.alignment_enabled = on;
        self
    }

    pub fn policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn max_documents(mut self, n: usize) -> Self {
        self.max_documents = n;
        self
    }

    pub fn timeout(mut self, t: Duration) -> Self {
        self.timeout = t;
        self
    }

    pub fn workers(mut self, n: usize) -> Self {
        self.workers = n;
        self
    }

    pub fn skip_namespaces(mut self, namespaces: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.namespace_skip_list.extend(namespaces.into_iter().map(Into::into));
        self
    }

    pub fn issuer_rules(mut self, rules: Vec<AlignmentRule>) -> Self {
        self.issuer_rules = rules;
        self
    }

    /// Worker count actually used.
    pub fn effective_workers(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.workers.max(1)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::NoSeeds);
        }
        if let Some(bad) = self.seeds.iter().find(|s| !has_scheme(s)) {
            return Err(ConfigError::RelativeSeed(bad.clone()));
        }
        if self.max_documents == 0 {
            return Err(ConfigError::ZeroMaxDocuments);
        }
        if self.workers == 0 {
            return Err(ConfigError::ZeroWorkers);
        }
        Ok(())
    }

    pub fn skips(&self, iri: &str) -> bool {
        self.namespace_skip_list.iter().any(|ns| iri.starts_with(ns.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("at least one seed IRI is required")]
    NoSeeds,
    #[error("seed <{0}> is not an absolute IRI")]
    RelativeSeed(String),
    #[error("maxDocuments must be at least 1")]
    ZeroMaxDocuments,
    #[error("workers must be at least 1")]
    ZeroWorkers,
}
