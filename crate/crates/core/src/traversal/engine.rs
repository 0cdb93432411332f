use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use super::config::{ConfigError, Policy, TraversalConfig};
use super::frontier::{FetchClass, Frontier};
use super::report::{
    ExecutionObserver, ExecutionReport, FetchedDocument, NoObserver, ProgressEvent, RuleSetSummary, TerminationCause,
};
use crate::alignment::{parse_rule_set, Registration, RejectReason, RejectedItem, Rejection, RuleRegistry};
#[cfg(feature = "parallel")]
use crate::parallel::{map_coarse, Parallelism};
use crate::rdf::vocab::semmap;
use crate::rdf::{strip_fragment, Document, Snapshot, SourcedTriple, Term, TripleStore};
use crate::source::{FetchError, SourceLayer};
use crate::sparql::{bind, evaluate, Query, TriplePattern};

/// Link candidates contributed by `new_aligned` under the configured policy.
/// Objects of rule-set location triples are never data candidates.
pub fn policy_candidates(new_aligned: &[SourcedTriple], cfg: &TraversalConfig, query: &Query) -> BTreeSet<String> {
    let patterns = query.pattern.triple_patterns();
    let mut out = BTreeSet::new();
    for t in new_aligned {
        if cfg.policy == Policy::MatchDriven && !unifies_with_any(t, &patterns) {
            continue;
        }
        let rule_link = t.predicate.as_iri() == Some(semmap::RULE_SET_LOCATION);
        let positions: &[&Term] = if rule_link { &[&t.subject] } else { &[&t.subject, &t.object] };
        for term in positions {
            if let Some(iri) = term.as_iri() {
                if is_dereferenceable(iri) && !cfg.skips(iri) {
                    out.insert(strip_fragment(iri).to_owned());
                }
            }
        }
    }
    out
}

fn unifies_with_any(t: &SourcedTriple, patterns: &[&TriplePattern]) -> bool {
    patterns.iter().any(|tp| bind(tp, t).is_some())
}

fn is_dereferenceable(iri: &str) -> bool {
    iri.starts_with("http://") || iri.starts_with("https://")
}

/// Objects of `semmap:ruleSetLocation` triples.
fn rule_set_locations<'a>(triples: impl IntoIterator<Item = &'a SourcedTriple>) -> Vec<String> {
    triples
        .into_iter()
        .filter(|t| t.predicate.as_iri() == Some(semmap::RULE_SET_LOCATION))
        .filter_map(|t| t.object.as_iri())
        .filter(|iri| is_dereferenceable(iri))
        .map(|iri| strip_fragment(iri).to_owned())
        .collect()
}

/// The state of one execution: store, rule registry, frontier, telemetry.
pub struct Traversal<'o> {
    query: Query,
    cfg: TraversalConfig,
    store: TripleStore,
    registry: RuleRegistry,
    frontier: Frontier,
    observer: &'o dyn ExecutionObserver,
    started: Instant,
    attempts: usize,
    documents_fetched: Vec<FetchedDocument>,
    fetch_errors: Vec<FetchError>,
    rule_sets_discovered: Vec<RuleSetSummary>,
    rules_rejected: Vec<Rejection>,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl<'o> Traversal<'o> {
    pub fn new(query: &Query, cfg: TraversalConfig) -> Result<Self, ConfigError> {
        Self::with_observer(query, cfg, &NoObserver)
    }

    pub fn with_observer(
        query: &Query,
        cfg: TraversalConfig,
        observer: &'o dyn ExecutionObserver,
    ) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut frontier = Frontier::new(cfg.deterministic);
        for seed in &cfg.seeds {
            frontier.enqueue(seed, FetchClass::Data);
        }
        #[cfg(feature = "parallel")]
        let pool = (cfg.effective_workers() > 1)
            .then(|| rayon::ThreadPoolBuilder::new().num_threads(cfg.effective_workers()).build().ok())
            .flatten();
        let mut traversal = Self {
            query: query.clone(),
            cfg,
            store: TripleStore::new(),
            registry: RuleRegistry::new(),
            frontier,
            observer,
            started: Instant::now(),
            attempts: 0,
            documents_fetched: Vec::new(),
            fetch_errors: Vec::new(),
            rule_sets_discovered: Vec::new(),
            rules_rejected: Vec::new(),
            #[cfg(feature = "parallel")]
            pool,
        };
        if traversal.cfg.alignment_enabled && !traversal.cfg.issuer_rules.is_empty() {
            let rules = traversal.cfg.issuer_rules.clone();
            traversal.registry.register_issuer_rules(&rules);
            let rejected: Vec<Rejection> = traversal.registry.rejected().to_vec();
            for r in rejected {
                traversal.reject(r);
            }
        }
        Ok(traversal)
    }

    pub fn store(&self) -> &TripleStore {
        &self.store
    }

    pub fn registry(&self) -> &RuleRegistry {
        &self.registry
    }

    pub fn frontier(&self) -> &Frontier {
        &self.frontier
    }

    /// Immutable view of the aligned triples ingested so far.
    pub fn snapshot_for_evaluation(&self) -> Snapshot {
        self.store.aligned_snapshot()
    }

    fn emit(&self, event: ProgressEvent) {
        self.observer.on_event(&event);
    }

    fn reject(&mut self, rejection: Rejection) {
        self.emit(ProgressEvent::RuleRejected(rejection.clone()));
        self.rules_rejected.push(rejection);
    }

    /// Fetch and process one batch. Returns the termination cause once the
    /// loop must stop.
    pub fn step(&mut self, src: &dyn SourceLayer) -> Option<TerminationCause> {
        if self.frontier.is_empty() {
            return Some(TerminationCause::FrontierExhausted);
        }
        if self.started.elapsed() >= self.cfg.timeout {
            return Some(TerminationCause::Timeout);
        }
        if self.attempts >= self.cfg.max_documents {
            return Some(TerminationCause::MaxDocuments);
        }
        let room = self.cfg.max_documents - self.attempts;
        let batch = self.frontier.pop_batch(self.cfg.effective_workers().min(room));
        self.attempts += batch.len();
        let fetched = self.fetch_batch(src, &batch);
        for ((_, class), (outcome, elapsed)) in batch.into_iter().zip(fetched) {
            match outcome {
                Ok(doc) => self.ingest(doc, class, elapsed),
                Err(err) => {
                    log::debug!("{err}");
                    self.fetch_errors.push(err);
                }
            }
        }
        None
    }

    fn fetch_batch(&self, src: &dyn SourceLayer, batch: &[(String, FetchClass)]) -> Vec<(Result<Document, FetchError>, Duration)> {
        let fetch = |(iri, _): &(String, FetchClass)| {
            let t0 = Instant::now();
            let outcome = src.fetch(iri);
            (outcome, t0.elapsed())
        };
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| map_coarse(batch, Parallelism::Parallel, fetch));
        }
        batch.iter().map(fetch).collect()
    }

    fn ingest(&mut self, doc: Document, class: FetchClass, fetch_duration: Duration) {
        self.frontier.mark_dequeued(&doc.iri);
        self.documents_fetched.push(FetchedDocument {
            iri: doc.iri.clone(),
            triple_count: doc.len(),
            fetch_duration,
            class,
        });
        self.emit(ProgressEvent::DocumentFetched {
            iri: doc.iri.clone(),
            triple_count: doc.len(),
            class,
            documents_so_far: self.documents_fetched.len(),
        });
        match class {
            FetchClass::RuleSet => self.ingest_rule_set(&doc),
            FetchClass::Data => self.ingest_data(doc),
        }
    }

    fn ingest_rule_set(&mut self, doc: &Document) {
        let rs = match parse_rule_set(doc) {
            Ok(rs) => rs,
            Err(err) => {
                self.reject(Rejection {
                    item: RejectedItem::RuleSet {
                        location: doc.iri.clone(),
                        subweb: String::new(),
                        prefixes: Vec::new(),
                    },
                    reason: RejectReason::Malformed,
                    detail: err.to_string(),
                });
                return;
            }
        };
        let registration = self.registry.register_rule_set(&rs);
        let (accepted_count, rejected) = match &registration {
            Registration::Accepted { accepted, rejected } => (accepted.len(), rejected.clone()),
            Registration::Rejected(r) => (0, vec![r.clone()]),
        };
        let summary = RuleSetSummary {
            location: rs.location.clone(),
            subweb: rs.subweb.id.clone(),
            prefixes: rs.subweb.prefixes.iter().cloned().collect(),
            accepted: registration.is_accepted(),
            accepted_rule_count: accepted_count,
            rejected_rule_count: match &registration {
                Registration::Accepted { rejected, .. } => rejected.len(),
                Registration::Rejected(_) => rs.rules.len(),
            },
        };
        self.emit(ProgressEvent::RuleSetDiscovered(summary.clone()));
        self.rule_sets_discovered.push(summary);
        for r in rejected {
            self.reject(r);
        }
        if registration.is_accepted() {
            let changed = self.registry.realign_subweb(&self.store, &rs.subweb, self.cfg.parallelism);
            self.emit(ProgressEvent::Realigned {
                subweb: rs.subweb.id.clone(),
                changed: changed.len(),
            });
            self.discover(&[], &changed);
        }
    }

    fn ingest_data(&mut self, doc: Document) {
        let originals: Vec<SourcedTriple> = doc.triples.into_iter().map(SourcedTriple::scope_blank_nodes).collect();
        let aligned: Vec<SourcedTriple> = if self.cfg.alignment_enabled {
            self.registry.align_batch(&originals, self.cfg.parallelism)
        } else {
            originals.iter().map(|t| t.clone().with_aligned(true)).collect()
        };
        for (o, a) in originals.iter().zip(&aligned) {
            self.store.link_aligned(o, a.clone());
        }
        self.discover(&originals, &aligned);
    }

    /// Enqueue rule-set locations and policy candidates.
    fn discover(&mut self, originals: &[SourcedTriple], aligned: &[SourcedTriple]) {
        if self.cfg.alignment_enabled {
            for location in rule_set_locations(originals.iter().chain(aligned)) {
                self.frontier.enqueue(&location, FetchClass::RuleSet);
            }
        }
        for iri in policy_candidates(aligned, &self.cfg, &self.query) {
            self.frontier.enqueue(&iri, FetchClass::Data);
        }
    }

    /// Run to termination and evaluate over the final snapshot.
    pub fn run(mut self, src: &dyn SourceLayer) -> ExecutionReport {
        let cause = loop {
            if let Some(cause) = self.step(src) {
                break cause;
            }
        };
        let results = evaluate(&self.query, &self.snapshot_for_evaluation());
        self.emit(ProgressEvent::ResultTable {
            results: results.clone(),
        });
        let report = ExecutionReport {
            results,
            documents_fetched: self.documents_fetched,
            fetch_errors: self.fetch_errors,
            rule_sets_discovered: self.rule_sets_discovered,
            rules_rejected: self.rules_rejected,
            total_duration: self.started.elapsed(),
            termination_cause: cause,
            alignment_enabled: self.cfg.alignment_enabled,
        };
        self.observer.on_event(&ProgressEvent::Done {
            report: Box::new(report.clone()),
        });
        report
    }
}

/// Traverse from the configured seeds and evaluate `query` over what was found.
pub fn execute(query: &Query, cfg: TraversalConfig, src: &dyn SourceLayer) -> Result<ExecutionReport, ConfigError> {
    Ok(Traversal::new(query, cfg)?.run(src))
}

pub fn execute_with_observer(
    query: &Query,
    cfg: TraversalConfig,
    src: &dyn SourceLayer,
    observer: &dyn ExecutionObserver,
) -> Result<ExecutionReport, ConfigError> {
    Ok(Traversal::with_observer(query, cfg, observer)?.run(src))
}
