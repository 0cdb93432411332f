use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::frontier::FetchClass;
use crate::alignment::Rejection;
use crate::source::FetchError;
use crate::sparql::ResultTable;

/// Durations travel as milliseconds with microsecond resolution.
pub mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_micros() as f64 / 1000.0)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        if !ms.is_finite() || ms < 0.0 {
            return Err(serde::de::Error::custom("duration must be a non-negative number of milliseconds"));
        }
        Ok(Duration::from_micros((ms * 1000.0).round() as u64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationCause {
    FrontierExhausted,
    MaxDocuments,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FetchedDocument {
    pub iri: String,
    pub triple_count: usize,
    #[serde(with = "duration_ms")]
    pub fetch_duration: Duration,
    pub class: FetchClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleSetSummary {
    pub location: String,
    pub subweb: String,
    pub prefixes: Vec<String>,
    pub accepted: bool,
    pub accepted_rule_count: usize,
    pub rejected_rule_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecutionReport {
    pub results: ResultTable,
    pub documents_fetched: Vec<FetchedDocument>,
    pub fetch_errors: Vec<FetchError>,
    pub rule_sets_discovered: Vec<RuleSetSummary>,
    pub rules_rejected: Vec<Rejection>,
    #[serde(with = "duration_ms")]
    pub total_duration: Duration,
    pub termination_cause: TerminationCause,
    pub alignment_enabled: bool,
}

impl ExecutionReport {
    /// Copy with every timing field set to zero.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        out.total_duration = Duration::ZERO;
        for d in &mut out.documents_fetched {
            d.fetch_duration = Duration::ZERO;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Progress notifications emitted while an execution runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum ProgressEvent {
    #[serde(rename_all = "camelCase")]
    DocumentFetched {
        iri: String,
        triple_count: usize,
        class: FetchClass,
        documents_so_far: usize,
    },
    RuleSetDiscovered(RuleSetSummary),
    RuleRejected(Rejection),
    #[serde(rename_all = "camelCase")]
    Realigned { subweb: String, changed: usize },
    #[serde(rename_all = "camelCase")]
    ResultTable { results: ResultTable },
    #[serde(rename_all = "camelCase")]
    Done { report: Box<ExecutionReport> },
    #[serde(rename_all = "camelCase")]
    Error { message: String },
}

impl ProgressEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            ProgressEvent::DocumentFetched { .. } => "documentFetched",
            ProgressEvent::RuleSetDiscovered(_) => "ruleSetDiscovered",
            ProgressEvent::RuleRejected(_) => "ruleRejected",
            ProgressEvent::Realigned { .. } => "realigned",
            ProgressEvent::ResultTable { .. } => "resultTable",
            ProgressEvent::Done { .. } => "done",
            ProgressEvent::Error { .. } => "error",
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, ProgressEvent::Done { .. } | ProgressEvent::Error { .. })
    }
}

pub trait ExecutionObserver: Send + Sync {
    fn on_event(&self, event: &ProgressEvent);
}

impl<F: Fn(&ProgressEvent) + Send + Sync> ExecutionObserver for F {
    fn on_event(&self, event: &ProgressEvent) {
        self(event)
    }
}

/// Observer that ignores everything.
pub struct NoObserver;

impl ExecutionObserver for NoObserver {
    fn on_event(&self, _: &ProgressEvent) {}
}

/// Check the per-execution event order: progress events, then one result
/// table, then one terminal event; or progress events ended by an error.
pub fn event_order_ok(events: &[ProgressEvent]) -> bool {
    let kinds: Vec<&str> = events.iter().map(ProgressEvent::kind).collect();
    match kinds.as_slice() {
        [progress @ .., "resultTable", "done"] | [progress @ .., "resultTable", "error"] | [progress @ .., "error"] => progress
            .iter()
            .all(|k| matches!(*k, "documentFetched" | "ruleSetDiscovered" | "ruleRejected" | "realigned")),
        _ => false,
    }
}
