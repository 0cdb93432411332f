//! Append-only indexed triple store.
//!
//! Every stored tuple is a full [`SourcedTriple`]; `(s, p, o, source, aligned)`
//! is the identity, so the same statement published by two documents is kept
//! twice. Lookups go through per-position hash indexes and always return
//! exactly what a linear scan over the live tuples would.
//!
//! Aligned tuples are derived from originals through [`TripleStore::link_aligned`].
//! The store keeps the original→aligned link and a reference count per aligned
//! tuple; an aligned tuple no original points at any more is retired, i.e. kept
//! in the log but hidden from lookups and snapshots.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use super::term::{SourcedTriple, Term};

/// A lookup pattern; `None` components are wildcards.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchPattern {
    pub subject: Option<Term>,
    pub predicate: Option<Term>,
    pub object: Option<Term>,
    pub source: Option<String>,
    pub aligned: Option<bool>,
}

impl MatchPattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn subject(mut self, t: Term) -> Self {
        self.subject = Some(t);
        self
    }

    pub fn predicate(mut self, t: Term) -> Self {
        self.predicate = Some(t);
        self
    }

    pub fn object(mut self, t: Term) -> Self {
        self.object = Some(t);
        self
    }

    pub fn source(mut self, s: impl Into<String>) -> Self {
        self.source = Some(s.into());
        self
    }

    pub fn aligned(mut self, a: bool) -> Self {
        self.aligned = Some(a);
        self
    }

    pub fn matches(&self, t: &SourcedTriple) -> bool {
        self.subject.as_ref().is_none_or(|s| *s == t.subject)
            && self.predicate.as_ref().is_none_or(|p| *p == t.predicate)
            && self.object.as_ref().is_none_or(|o| *o == t.object)
            && self.source.as_ref().is_none_or(|s| *s == t.source)
            && self.aligned.is_none_or(|a| a == t.aligned)
    }
}

#[derive(Debug, Default, Clone)]
struct Indexed {
    triples: Vec<SourcedTriple>,
    live: Vec<bool>,
    positions: HashMap<SourcedTriple, u32>,
    by_subject: HashMap<Term, Vec<u32>>,
    by_predicate: HashMap<Term, Vec<u32>>,
    by_object: HashMap<Term, Vec<u32>>,
    by_source: HashMap<String, Vec<u32>>,
    live_count: usize,
}

impl Indexed {
    /// Returns the position and whether the tuple became visible.
    fn insert(&mut self, t: SourcedTriple) -> (u32, bool) {
        if let Some(&pos) = self.positions.get(&t) {
            let revived = !self.live[pos as usize];
            if revived {
                self.live[pos as usize] = true;
                self.live_count += 1;
            }
            return (pos, revived);
        }
        let pos = u32::try_from(self.triples.len()).expect("store exceeds u32 positions");
        self.by_subject.entry(t.subject.clone()).or_default().push(pos);
        self.by_predicate.entry(t.predicate.clone()).or_default().push(pos);
        self.by_object.entry(t.object.clone()).or_default().push(pos);
        self.by_source.entry(t.source.clone()).or_default().push(pos);
        self.positions.insert(t.clone(), pos);
        self.triples.push(t);
        self.live.push(true);
        self.live_count += 1;
        (pos, true)
    }

    fn retire(&mut self, pos: u32) {
        if std::mem::replace(&mut self.live[pos as usize], false) {
            self.live_count -= 1;
        }
    }

    fn candidates(&self, pattern: &MatchPattern) -> Option<&[u32]> {
        const EMPTY: &[u32] = &[];
        let lists = [
            pattern.subject.as_ref().map(|s| self.by_subject.get(s)),
            pattern.predicate.as_ref().map(|p| self.by_predicate.get(p)),
            pattern.object.as_ref().map(|o| self.by_object.get(o)),
            pattern.source.as_ref().map(|s| self.by_source.get(s)),
        ];
        lists
            .into_iter()
            .flatten()
            .map(|list| list.map_or(EMPTY, Vec::as_slice))
            .min_by_key(|list| list.len())
    }

    fn for_each_match<'a>(&'a self, pattern: &MatchPattern, mut f: impl FnMut(&'a SourcedTriple)) {
        let mut visit = |pos: usize| {
            let t = &self.triples[pos];
            if self.live[pos] && pattern.matches(t) {
                f(t);
            }
        };
        match self.candidates(pattern) {
            Some(list) => list.iter().for_each(|&p| visit(p as usize)),
            None => (0..self.triples.len()).for_each(visit),
        }
    }

    fn matches(&self, pattern: &MatchPattern) -> Vec<SourcedTriple> {
        let mut out = Vec::new();
        self.for_each_match(pattern, |t| out.push(t.clone()));
        out
    }

    fn count(&self, pattern: &MatchPattern) -> usize {
        let mut n = 0;
        self.for_each_match(pattern, |_| n += 1);
        n
    }

    fn live_triples(&self) -> impl Iterator<Item = &SourcedTriple> {
        self.triples
            .iter()
            .zip(&self.live)
            .filter_map(|(t, &live)| live.then_some(t))
    }
}

#[derive(Debug, Default)]
struct Links {
    /// original position -> aligned position
    aligned_of: HashMap<u32, u32>,
    refcount: HashMap<u32, u32>,
}

#[derive(Debug, Default)]
struct StoreState {
    data: Indexed,
    links: Links,
}

/// Concurrent-append triple store with snapshot reads.
#[derive(Debug, Default)]
pub struct TripleStore {
    state: RwLock<StoreState>,
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a tuple. Returns `true` iff it was not already present.
    pub fn insert(&self, t: SourcedTriple) -> bool {
        self.state.write().data.insert(t).1
    }

    /// Number of tuples ever inserted. Monotone.
    pub fn len(&self) -> usize {
        self.state.read().data.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of tuples visible to lookups.
    pub fn live_len(&self) -> usize {
        self.state.read().data.live_count
    }

    pub fn matches(&self, pattern: &MatchPattern) -> Vec<SourcedTriple> {
        self.state.read().data.matches(pattern)
    }

    pub fn count(&self, pattern: &MatchPattern) -> usize {
        self.state.read().data.count(pattern)
    }

    /// Record `aligned` as the current aligned form of `original`, inserting
    /// both if needed. The previously linked aligned tuple is retired once no
    /// original refers to it. Returns `true` iff the aligned form changed.
    pub fn link_aligned(&self, original: &SourcedTriple, aligned: SourcedTriple) -> bool {
        debug_assert!(!original.aligned && aligned.aligned);
        let mut guard = self.state.write();
        let StoreState { data, links } = &mut *guard;
        let (orig_pos, _) = data.insert(original.clone());
        let (new_pos, _) = data.insert(aligned);
        let previous = links.aligned_of.insert(orig_pos, new_pos);
        if previous == Some(new_pos) {
            return false;
        }
        *links.refcount.entry(new_pos).or_default() += 1;
        if let Some(old) = previous {
            let rc = links.refcount.get_mut(&old).expect("linked tuple has a refcount");
            *rc -= 1;
            if *rc == 0 {
                data.retire(old);
            }
        }
        true
    }

    /// The aligned form currently linked to `original`.
    pub fn aligned_form(&self, original: &SourcedTriple) -> Option<SourcedTriple> {
        let guard = self.state.read();
        let pos = guard.data.positions.get(original)?;
        let aligned = guard.links.aligned_of.get(pos)?;
        Some(guard.data.triples[*aligned as usize].clone())
    }

    /// Original tuples whose source satisfies `pred`, in insertion order.
    pub fn originals_from(&self, mut pred: impl FnMut(&str) -> bool) -> Vec<SourcedTriple> {
        let guard = self.state.read();
        let data = &guard.data;
        let mut positions: Vec<u32> = data
            .by_source
            .iter()
            .filter(|(src, _)| pred(src))
            .flat_map(|(_, list)| list.iter().copied())
            .filter(|&p| !data.triples[p as usize].aligned && data.live[p as usize])
            .collect();
        positions.sort_unstable();
        positions
            .into_iter()
            .map(|p| data.triples[p as usize].clone())
            .collect()
    }

    /// Stable view of every live tuple inserted so far.
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            data: Arc::new(self.state.read().data.clone()),
        }
    }

    /// Stable view of the live aligned tuples only.
    pub fn aligned_snapshot(&self) -> Snapshot {
        let guard = self.state.read();
        Snapshot::from_triples(guard.data.live_triples().filter(|t| t.aligned).cloned())
    }
}

/// Immutable indexed view of a set of tuples.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    data: Arc<Indexed>,
}

impl Snapshot {
    pub fn from_triples(triples: impl IntoIterator<Item = SourcedTriple>) -> Self {
        let mut data = Indexed::default();
        for t in triples {
            data.insert(t);
        }
        Self { data: Arc::new(data) }
    }

    pub fn len(&self) -> usize {
        self.data.live_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matches(&self, pattern: &MatchPattern) -> Vec<SourcedTriple> {
        self.data.matches(pattern)
    }

    pub fn count(&self, pattern: &MatchPattern) -> usize {
        self.data.count(pattern)
    }

    pub fn for_each_match<'a>(&'a self, pattern: &MatchPattern, f: impl FnMut(&'a SourcedTriple)) {
        self.data.for_each_match(pattern, f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SourcedTriple> {
        self.data.live_triples()
    }
}
