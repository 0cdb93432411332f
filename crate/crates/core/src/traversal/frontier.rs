use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::rdf::strip_fragment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FetchClass {
    RuleSet,
    Data,
}

/// Pending IRIs in two priority classes. Each fragmentless IRI is handed
/// out at most once per execution.
#[derive(Debug, Clone)]
pub struct Frontier {
    deterministic: bool,
    seq: u64,
    queues: [BTreeSet<(u64, String)>; 2],
    pending: HashMap<String, (FetchClass, u64)>,
    dequeued: HashSet<String>,
}

fn slot(class: FetchClass) -> usize {
    match class {
        FetchClass::RuleSet => 0,
        FetchClass::Data => 1,
    }
}

impl Frontier {
    /// Deterministic frontiers hand out the lexicographically smallest IRI of a
    /// class; otherwise entries leave in arrival order.
    pub fn new(deterministic: bool) -> Self {
        Self {
            deterministic,
            seq: 0,
            queues: Default::default(),
            pending: HashMap::new(),
            dequeued: HashSet::new(),
        }
    }

    /// Returns whether the IRI was newly queued or promoted to the rule-set class.
    pub fn enqueue(&mut self, iri: &str, class: FetchClass) -> bool {
        let iri = strip_fragment(iri);
        if self.dequeued.contains(iri) {
            return false;
        }
        if let Some(&(existing, key)) = self.pending.get(iri) {
            if existing == FetchClass::Data && class == FetchClass::RuleSet {
                self.queues[slot(existing)].remove(&(key, iri.to_owned()));
                self.queues[slot(class)].insert((key, iri.to_owned()));
                self.pending.insert(iri.to_owned(), (class, key));
                return true;
            }
            return false;
        }
        let key = if self.deterministic { 0 } else { self.seq };
        self.seq += 1;
        self.queues[slot(class)].insert((key, iri.to_owned()));
        self.pending.insert(iri.to_owned(), (class, key));
        true
    }

    pub fn pop(&mut self) -> Option<(String, FetchClass)> {
        for class in [FetchClass::RuleSet, FetchClass::Data] {
            if let Some((_, iri)) = self.queues[slot(class)].pop_first() {
                self.pending.remove(&iri);
                self.dequeued.insert(iri.clone());
                return Some((iri, class));
            }
        }
        None
    }

    /// Record `iri` as handled without it having been queued, e.g. the
    /// target of a redirect.
    pub fn mark_dequeued(&mut self, iri: &str) {
        let iri = strip_fragment(iri);
        if let Some((class, key)) = self.pending.remove(iri) {
            self.queues[slot(class)].remove(&(key, iri.to_owned()));
        }
        self.dequeued.insert(iri.to_owned());
    }

    pub fn pop_batch(&mut self, n: usize) -> Vec<(String, FetchClass)> {
        std::iter::from_fn(|| self.pop()).take(n).collect()
    }

    pub fn is_known(&self, iri: &str) -> bool {
        let iri = strip_fragment(iri);
        self.dequeued.contains(iri) || self.pending.contains_key(iri)
    }

    pub fn was_dequeued(&self, iri: &str) -> bool {
        self.dequeued.contains(strip_fragment(iri))
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}
