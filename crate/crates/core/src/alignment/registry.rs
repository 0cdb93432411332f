//! Rule admission and forward-chaining rewrite.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::rules::{AlignmentRule, Category, RuleSet, Scope, Subweb};
use crate::parallel::{map_slice, Parallelism};
use crate::rdf::vocab::rdf;
use crate::rdf::{SourcedTriple, Term, TripleStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RejectReason {
    Overlap,
    Cycle,
    Malformed,
}

/// What was turned away: a whole rule set or one rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum RejectedItem {
    #[serde(rename_all = "camelCase")]
    RuleSet {
        location: String,
        subweb: String,
        prefixes: Vec<String>,
    },
    Rule(AlignmentRule),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rejection {
    pub item: RejectedItem,
    pub reason: RejectReason,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Registration {
    Accepted {
        accepted: Vec<AlignmentRule>,
        rejected: Vec<Rejection>,
    },
    Rejected(Rejection),
}

impl Registration {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Registration::Accepted { .. })
    }

    pub fn rejection_reason(&self) -> Option<RejectReason> {
        match self {
            Registration::Rejected(r) => Some(r.reason),
            Registration::Accepted { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleStatus {
    Accepted,
    Rejected(RejectReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Subject,
    Predicate,
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub position: Position,
    pub rule: Arc<AlignmentRule>,
}

pub type ApplicationTrace = Vec<TraceStep>;

type Edges = HashMap<String, Arc<AlignmentRule>>;

/// Accepted subwebs and rules, plus everything that was rejected.
#[derive(Debug, Clone, Default)]
pub struct RuleRegistry {
    subwebs: Vec<Subweb>,
    edges: HashMap<(Scope, Category), Edges>,
    rejected: Vec<Rejection>,
    next_ordinal: u64,
    accepted_rules: usize,
}

impl RuleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subwebs(&self) -> &[Subweb] {
        &self.subwebs
    }

    pub fn subweb(&self, id: &str) -> Option<&Subweb> {
        self.subwebs.iter().find(|w| w.id == id)
    }

    /// The accepted subweb containing `doc`; unique by non-overlap.
    pub fn subweb_for(&self, doc: &str) -> Option<&Subweb> {
        self.subwebs.iter().find(|w| w.contains(doc))
    }

    pub fn rejected(&self) -> &[Rejection] {
        &self.rejected
    }

    pub fn accepted_rule_count(&self) -> usize {
        self.accepted_rules
    }

    /// Accepted rules in admission order.
    pub fn rules(&self) -> Vec<Arc<AlignmentRule>> {
        let mut all: Vec<Arc<AlignmentRule>> = self.edges.values().flat_map(|e| e.values().cloned()).collect();
        all.sort_by_key(|r| r.ordinal);
        all
    }

    /// Rewrite edges of one category visible from `scope` (its own plus issuer rules).
    pub fn combined_edges(&self, scope: Option<&str>, category: Category) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |s: Scope| {
            if let Some(edges) = self.edges.get(&(s, category)) {
                out.extend(edges.values().map(|r| (r.source_term.clone(), r.target_term.clone())));
            }
        };
        if let Some(id) = scope {
            push(Scope::Subweb(id.to_owned()));
        }
        push(Scope::Issuer);
        out.sort();
        out
    }

    fn next(&self, scope: Option<&str>, category: Category, term: &str) -> Option<&Arc<AlignmentRule>> {
        scope
            .and_then(|id| self.edges.get(&(Scope::Subweb(id.to_owned()), category)))
            .and_then(|e| e.get(term))
            .or_else(|| self.edges.get(&(Scope::Issuer, category)).and_then(|e| e.get(term)))
    }

    /// Terminal of the rewrite chain for `term`, appending applied rules to `trace`.
    fn chase(&self, scope: Option<&str>, category: Category, term: &str, position: Position, trace: &mut ApplicationTrace) -> Option<String> {
        let mut current: Option<String> = None;
        while let Some(rule) = self.next(scope, category, current.as_deref().unwrap_or(term)) {
            trace.push(TraceStep {
                position,
                rule: Arc::clone(rule),
            });
            current = Some(rule.target_term.clone());
            debug_assert!(trace.len() <= 3 * self.accepted_rules, "rewrite graph has a cycle");
        }
        current
    }

    /// Whether `from` reaches `to` in the combined graph of `scope`.
    fn reaches(&self, scope: Option<&str>, category: Category, from: &str, to: &str) -> bool {
        let mut current = from.to_owned();
        let mut steps = 0;
        loop {
            if current == to {
                return true;
            }
            match self.next(scope, category, &current) {
                Some(rule) => current = rule.target_term.clone(),
                None => return false,
            }
            steps += 1;
            assert!(steps <= self.accepted_rules + 1, "rewrite graph has a cycle");
        }
    }

    fn has_edge(&self, scope: Option<&str>, category: Category, term: &str) -> bool {
        self.next(scope, category, term).is_some()
    }

    /// Why `rule` cannot join the combined graph of `scope`, if it cannot.
    fn conflict(&self, scope: Option<&str>, rule: &AlignmentRule) -> Option<(RejectReason, String)> {
        let c = rule.category();
        if self.has_edge(scope, c, &rule.source_term) {
            return Some((RejectReason::Malformed, format!("<{}> already has a rewrite", rule.source_term)));
        }
        if self.reaches(scope, c, &rule.target_term, &rule.source_term) {
            return Some((RejectReason::Cycle, format!("{rule} closes a rewrite cycle")));
        }
        None
    }

    fn admit(&mut self, mut rule: AlignmentRule) -> Result<AlignmentRule, Box<Rejection>> {
        rule.ordinal = self.next_ordinal;
        self.next_ordinal += 1;
        let conflict = match &rule.scope {
            Scope::Subweb(id) => self.conflict(Some(id), &rule),
            Scope::Issuer => {
                let mut scopes: Vec<Option<&str>> = self.subwebs.iter().map(|w| Some(w.id.as_str())).collect();
                scopes.push(None);
                scopes.into_iter().find_map(|s| self.conflict(s, &rule))
            }
        };
        if let Some((reason, detail)) = conflict {
            let rejection = Rejection {
                item: RejectedItem::Rule(rule),
                reason,
                detail,
            };
            self.rejected.push(rejection.clone());
            return Err(Box::new(rejection));
        }
        self.edges
            .entry((rule.scope.clone(), rule.category()))
            .or_default()
            .insert(rule.source_term.clone(), Arc::new(rule.clone()));
        self.accepted_rules += 1;
        Ok(rule)
    }

    /// Admit a discovered rule set: whole-set rejection on overlap, per-rule
    /// rejection on cycles and duplicate sources.
    pub fn register_rule_set(&mut self, rs: &RuleSet) -> Registration {
        let set_rejection = |reason, detail: String| Rejection {
            item: RejectedItem::RuleSet {
                location: rs.location.clone(),
                subweb: rs.subweb.id.clone(),
                prefixes: rs.subweb.prefixes.iter().cloned().collect(),
            },
            reason,
            detail,
        };
        let problem = if let Some(other) = self.subwebs.iter().find(|w| w.overlaps(&rs.subweb)) {
            Some(set_rejection(RejectReason::Overlap, format!("overlaps accepted subweb <{}>", other.id)))
        } else if rs.rules.iter().any(|r| r.scope != Scope::Subweb(rs.subweb.id.clone())) {
            Some(set_rejection(RejectReason::Malformed, "rule scoped outside its set".into()))
        } else {
            None
        };
        if let Some(rejection) = problem {
            self.rejected.push(rejection.clone());
            return Registration::Rejected(rejection);
        }
        self.subwebs.push(rs.subweb.clone());
        let mut accepted = Vec::new();
        let mut rejected = Vec::new();
        for rule in &rs.rules {
            match self.admit(rule.clone()) {
                Ok(r) => accepted.push(r),
                Err(r) => rejected.push(*r),
            }
        }
        Registration::Accepted { accepted, rejected }
    }

    pub fn register_issuer_rules(&mut self, rules: &[AlignmentRule]) -> Vec<RuleStatus> {
        rules
            .iter()
            .map(|rule| {
                debug_assert_eq!(rule.scope, Scope::Issuer);
                match self.admit(rule.clone()) {
                    Ok(_) => RuleStatus::Accepted,
                    Err(r) => RuleStatus::Rejected(r.reason),
                }
            })
            .collect()
    }

    /// Rewrite `t` to its fixpoint under the rules applicable to its source.
    pub fn align_triple(&self, t: &SourcedTriple) -> (SourcedTriple, ApplicationTrace) {
        let scope = self.subweb_for(&t.source).map(|w| w.id.as_str());
        let mut trace = ApplicationTrace::new();
        let mut out = t.clone();
        out.aligned = true;
        if self.accepted_rules == 0 {
            return (out, trace);
        }
        let rewrite = |term: &mut Term, category, position, trace: &mut ApplicationTrace| {
            if let Term::Iri(iri) = term {
                if let Some(target) = self.chase(scope, category, iri, position, trace) {
                    *iri = target;
                }
            }
        };
        rewrite(&mut out.subject, Category::Entity, Position::Subject, &mut trace);
        rewrite(&mut out.predicate, Category::Predicate, Position::Predicate, &mut trace);
        let object_category = if out.predicate.as_iri() == Some(rdf::TYPE) {
            Category::Class
        } else {
            Category::Entity
        };
        rewrite(&mut out.object, object_category, Position::Object, &mut trace);
        (out, trace)
    }

    /// `align_triple` over a batch, order preserved.
    pub fn align_batch(&self, triples: &[SourcedTriple], mode: Parallelism) -> Vec<SourcedTriple> {
        map_slice(triples, mode, |t| self.align_triple(t).0)
    }

    /// Recompute aligned forms of every stored original from `w`. Returns the
    /// aligned tuples that changed, in original insertion order.
    pub fn realign_subweb(&self, store: &TripleStore, w: &Subweb, mode: Parallelism) -> Vec<SourcedTriple> {
        let originals = store.originals_from(|src| w.contains(src));
        let aligned = self.align_batch(&originals, mode);
        originals
            .iter()
            .zip(aligned)
            .filter_map(|(o, a)| store.link_aligned(o, a.clone()).then_some(a))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::rules::Relation;
    use crate::rdf::MatchPattern;

    fn rule(s: &str, rel: Relation, t: &str, scope: &Scope) -> AlignmentRule {
        AlignmentRule {
            source_term: s.into(),
            relation: rel,
            target_term: t.into(),
            scope: scope.clone(),
            origin_document: "http://doc".into(),
            ordinal: 0,
        }
    }

    fn rule_set(id: &str, prefix: &str, rules: &[(&str, Relation, &str)]) -> RuleSet {
        let scope = Scope::Subweb(id.into());
        RuleSet {
            location: format!("{prefix}rules"),
            subweb: Subweb::new(id, [prefix]).unwrap(),
            rules: rules.iter().map(|(s, r, t)| rule(s, *r, t, &scope)).collect(),
        }
    }

    fn triple(s: &str, p: &str, o: Term, src: &str) -> SourcedTriple {
        SourcedTriple::new(Term::iri(s), Term::iri(p), o, src)
    }

    const EQP: Relation = Relation::PredicateEquivalence;

    #[test]
    fn disjoint_sets_both_accepted() {
        let mut reg = RuleRegistry::new();
        assert!(reg.register_rule_set(&rule_set("http://a/w", "http://a/", &[])).is_accepted());
        assert!(reg.register_rule_set(&rule_set("http://b/w", "http://b/", &[])).is_accepted());
        assert_eq!(reg.subwebs().len(), 2);
    }

    #[test]
    fn extending_prefix_is_overlap() {
        let mut reg = RuleRegistry::new();
        reg.register_rule_set(&rule_set("http://a/w", "http://a/", &[("http://x", EQP, "http://y")]));
        let before = reg.rules().len();
        let out = reg.register_rule_set(&rule_set("http://a/sub/w", "http://a/sub/", &[("http://p", EQP, "http://q")]));
        assert_eq!(out.rejection_reason(), Some(RejectReason::Overlap));
        assert_eq!(reg.subwebs().len(), 1);
        assert_eq!(reg.rules().len(), before);
    }

    #[test]
    fn reversed_registration_swaps_labels() {
        let mut reg = RuleRegistry::new();
        assert!(reg.register_rule_set(&rule_set("http://a/sub/w", "http://a/sub/", &[])).is_accepted());
        assert!(!reg.register_rule_set(&rule_set("http://a/w", "http://a/", &[])).is_accepted());
    }

    #[test]
    fn two_cycle_rejects_second_rule() {
        let mut reg = RuleRegistry::new();
        let out = reg.register_rule_set(&rule_set(
            "http://a/w",
            "http://a/",
            &[("http://a", EQP, "http://b"), ("http://b", EQP, "http://a")],
        ));
        let Registration::Accepted { accepted, rejected } = out else {
            panic!("set rejected")
        };
        assert_eq!(accepted.len(), 1);
        assert_eq!(accepted[0].source_term, "http://a");
        assert_eq!(rejected.len(), 1);
        assert_eq!(rejected[0].reason, RejectReason::Cycle);
    }

    #[test]
    fn cycles_are_per_category() {
        let mut reg = RuleRegistry::new();
        let out = reg.register_rule_set(&rule_set(
            "http://a/w",
            "http://a/",
            &[("http://a", EQP, "http://b"), ("http://b", Relation::ClassEquivalence, "http://a")],
        ));
        let Registration::Accepted { accepted, .. } = out else { panic!() };
        assert_eq!(accepted.len(), 2);
    }

    #[test]
    fn duplicate_source_is_malformed() {
        let mut reg = RuleRegistry::new();
        let out = reg.register_rule_set(&rule_set(
            "http://a/w",
            "http://a/",
            &[("http://a", EQP, "http://b"), ("http://a", EQP, "http://c")],
        ));
        let Registration::Accepted { rejected, .. } = out else { panic!() };
        assert_eq!(rejected[0].reason, RejectReason::Malformed);
    }

    #[test]
    fn issuer_rules() {
        let mut reg = RuleRegistry::new();
        assert!(reg.register_issuer_rules(&[]).is_empty());
        reg.register_rule_set(&rule_set("http://a/w", "http://a/", &[("http://x", EQP, "http://y")]));
        let statuses = reg.register_issuer_rules(&[
            rule("http://y", EQP, "http://x", &Scope::Issuer),
            rule("http://p", EQP, "http://q", &Scope::Issuer),
        ]);
        assert_eq!(statuses, vec![RuleStatus::Rejected(RejectReason::Cycle), RuleStatus::Accepted]);
        for src in ["http://a/doc", "http://elsewhere/doc"] {
            let (aligned, _) = reg.align_triple(&triple("http://s", "http://p", Term::literal("v"), src));
            assert_eq!(aligned.predicate, Term::iri("http://q"));
        }
    }

    #[test]
    fn http_to_https_predicate() {
        let mut reg = RuleRegistry::new();
        reg.register_rule_set(&rule_set(
            "http://pods.ex/a/w",
            "http://pods.ex/a/",
            &[("http://schema.org/name", EQP, "https://schema.org/name")],
        ));
        let t = triple("http://pods.ex/a/card#me", "http://schema.org/name", Term::literal("Ann"), "http://pods.ex/a/card");
        let (aligned, trace) = reg.align_triple(&t);
        assert_eq!(aligned.predicate, Term::iri("https://schema.org/name"));
        assert_eq!((aligned.subject.clone(), aligned.object.clone(), aligned.source.clone()), (t.subject.clone(), t.object.clone(), t.source.clone()));
        assert!(aligned.aligned);
        assert_eq!(trace.len(), 1);

        let outside = triple("http://pods.ex/b/card#me", "http://schema.org/name", Term::literal("Bo"), "http://pods.ex/b/card");
        let (aligned, trace) = reg.align_triple(&outside);
        assert_eq!(aligned.spo(), outside.spo());
        assert!(trace.is_empty());
    }

    #[test]
    fn chain_two_steps() {
        let mut reg = RuleRegistry::new();
        reg.register_rule_set(&rule_set(
            "http://a/w",
            "http://a/",
            &[("http://v/a", EQP, "http://v/b"), ("http://v/b", EQP, "http://v/c")],
        ));
        let (aligned, trace) = reg.align_triple(&triple("http://s", "http://v/a", Term::literal("x"), "http://a/d"));
        assert_eq!(aligned.predicate, Term::iri("http://v/c"));
        assert_eq!(trace.len(), 2);
        assert!(trace.iter().all(|s| s.position == Position::Predicate));
    }

    #[test]
    fn class_and_entity_positions() {
        let mut reg = RuleRegistry::new();
        reg.register_rule_set(&rule_set(
            "http://a/w",
            "http://a/",
            &[
                ("http://v/Reply", Relation::ClassSpecialization, "http://v/Comment"),
                ("http://e/old", Relation::EntityIdentity, "http://e/new"),
            ],
        ));
        let (typed, _) = reg.align_triple(&triple("http://e/old", rdf::TYPE, Term::iri("http://v/Reply"), "http://a/d"));
        assert_eq!(typed.subject, Term::iri("http://e/new"));
        assert_eq!(typed.object, Term::iri("http://v/Comment"));
        let (linked, _) = reg.align_triple(&triple("http://s", "http://p", Term::iri("http://e/old"), "http://a/d"));
        assert_eq!(linked.object, Term::iri("http://e/new"));
        let (untyped, _) = reg.align_triple(&triple("http://s", "http://p", Term::iri("http://v/Reply"), "http://a/d"));
        assert_eq!(untyped.object, Term::iri("http://v/Reply"));
    }

    #[test]
    fn realignment_counts_changes() {
        let store = TripleStore::new();
        let mut reg = RuleRegistry::new();
        let src = "http://a/doc";
        let preds = ["http://old/p", "http://old/p", "http://old/p", "http://new/q", "http://new/r"];
        for (i, p) in preds.iter().enumerate() {
            let t = triple(&format!("http://a/s{i}"), p, Term::literal("v"), src);
            let (a, _) = reg.align_triple(&t);
            store.link_aligned(&t, a);
        }
        let rs = rule_set("http://a/w", "http://a/", &[("http://old/p", EQP, "http://new/p")]);
        reg.register_rule_set(&rs);
        let w = reg.subweb("http://a/w").unwrap().clone();
        assert_eq!(reg.realign_subweb(&store, &w, Parallelism::Sequential).len(), 3);
        assert_eq!(reg.realign_subweb(&store, &w, Parallelism::Sequential).len(), 0);
        let view = store.aligned_snapshot();
        assert_eq!(view.len(), 5);
        assert_eq!(view.count(&MatchPattern::any().predicate(Term::iri("http://old/p"))), 0);

        let empty = Subweb::new("http://z/w", ["http://z/"]).unwrap();
        assert_eq!(reg.realign_subweb(&store, &empty, Parallelism::Parallel).len(), 0);
    }
}
