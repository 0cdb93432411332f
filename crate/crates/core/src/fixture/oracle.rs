//! Ground truth: every document in one store, every rule applied everywhere.

use std::collections::HashMap;

use super::FixtureSet;
use crate::rdf::vocab::{rdf, semmap};
use crate::rdf::{parse_turtle, Snapshot, SourcedTriple, Term};
use crate::sparql::{evaluate, Query, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Predicate,
    Class,
    Entity,
}

fn kind_of(relation: &str) -> Option<Kind> {
    match relation {
        semmap::EQUIVALENT_PROPERTY | semmap::SUB_PROPERTY_OF => Some(Kind::Predicate),
        semmap::EQUIVALENT_CLASS | semmap::SUB_CLASS_OF => Some(Kind::Class),
        semmap::SAME_AS => Some(Kind::Entity),
        _ => None,
    }
}

/// Source → target maps read straight off the mapping triples of every rule document.
fn global_rules(fx: &FixtureSet) -> HashMap<Kind, HashMap<String, String>> {
    let mut rules: HashMap<Kind, HashMap<String, String>> = HashMap::new();
    for location in &fx.rule_set_documents {
        let doc = parse_turtle(&fx.documents[location], location).expect("fixture rule set parses");
        let mut slots: HashMap<&Term, [Option<&str>; 3]> = HashMap::new();
        for t in &doc.triples {
            let slot = match t.predicate.as_iri() {
                Some(semmap::SUBJECT_ID) => 0,
                Some(semmap::MAPPING_RELATION) => 1,
                Some(semmap::OBJECT_ID) => 2,
                _ => continue,
            };
            slots.entry(&t.subject).or_default()[slot] = t.object.as_iri();
        }
        for [source, relation, target] in slots.into_values() {
            if let (Some(s), Some(kind), Some(t)) = (source, relation.and_then(kind_of), target) {
                rules.entry(kind).or_default().insert(s.to_owned(), t.to_owned());
            }
        }
    }
    rules
}

fn step(rules: &HashMap<Kind, HashMap<String, String>>, kind: Kind, term: &Term) -> Option<Term> {
    let iri = term.as_iri()?;
    rules.get(&kind)?.get(iri).map(Term::iri)
}

/// Apply single rewrite steps until nothing changes.
fn align_globally(rules: &HashMap<Kind, HashMap<String, String>>, mut t: SourcedTriple) -> SourcedTriple {
    for _ in 0..10_000 {
        let mut changed = false;
        if let Some(s) = step(rules, Kind::Entity, &t.subject) {
            t.subject = s;
            changed = true;
        }
        if let Some(p) = step(rules, Kind::Predicate, &t.predicate) {
            t.predicate = p;
            changed = true;
        }
        let object_kind = if t.predicate.as_iri() == Some(rdf::TYPE) { Kind::Class } else { Kind::Entity };
        if let Some(o) = step(rules, object_kind, &t.object) {
            t.object = o;
            changed = true;
        }
        if !changed {
            return t.with_aligned(true);
        }
    }
    panic!("rule rewriting did not reach a fixpoint");
}

/// All non-rule documents merged into one view, optionally aligned.
pub fn centralized_view(fx: &FixtureSet, alignment: bool) -> Snapshot {
    let rules = if alignment { global_rules(fx) } else { HashMap::new() };
    let mut triples = Vec::new();
    for (iri, text) in &fx.documents {
        if fx.rule_set_documents.contains(iri) {
            continue;
        }
        let doc = parse_turtle(text, iri).expect("fixture document parses");
        triples.extend(doc.triples.into_iter().map(|t| align_globally(&rules, t.scope_blank_nodes())));
    }
    Snapshot::from_triples(triples)
}

pub fn centralized_oracle(fx: &FixtureSet, query: &Query, alignment: bool) -> ResultTable {
    evaluate(query, &centralized_view(fx, alignment))
}
