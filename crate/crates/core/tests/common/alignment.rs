//! Random rule registries and triples for alignment properties.

#![allow(dead_code)]

use std::collections::HashMap;

use ltqp_align::alignment::{AlignmentRule, Category, Relation, RuleRegistry, RuleSet, Scope, Subweb};
use ltqp_align::rdf::vocab::rdf;
use ltqp_align::rdf::{SourcedTriple, Term};
use proptest::prelude::*;

use super::oracles::RuleMaps;

pub const PREFIXES: [&str; 4] = ["http://h/a/", "http://h/a/b/", "http://h/c/", "http://h/d/"];
pub const SOURCES: [&str; 5] = ["http://h/a/doc", "http://h/a/b/doc", "http://h/c/doc", "http://h/d/x", "http://h/z/doc"];

pub fn pool(category: Category) -> Vec<String> {
    let (stem, n) = match category {
        Category::Predicate => ("http://v/p", 5),
        Category::Class => ("http://v/C", 4),
        Category::Entity => ("http://e/n", 4),
    };
    (0..n).map(|i| format!("{stem}{i}")).collect()
}

pub fn rule_spec() -> impl Strategy<Value = RuleSpec> {
    (prop::sample::select(Relation::ALL.to_vec()), 0..5usize, 0..5usize)
}

pub fn make_rule((relation, s, t): RuleSpec, scope: Scope) -> Option<AlignmentRule> {
    let terms = pool(relation.category());
    let (s, t) = (&terms[s % terms.len()], &terms[t % terms.len()]);
    (s != t).then(|| AlignmentRule {
        source_term: s.clone(),
        relation,
        target_term: t.clone(),
        scope,
        origin_document: "http://h/rules".into(),
        ordinal: 0,
    })
}

/// A mapping as (relation, source pool index, target pool index).
pub type RuleSpec = (Relation, usize, usize);

#[derive(Debug, Clone)]
pub struct Scenario {
    pub sets: Vec<(usize, Vec<RuleSpec>)>,
    pub issuer: Vec<RuleSpec>,
    pub issuer_first: bool,
}

pub fn scenario() -> impl Strategy<Value = Scenario> {
    (
        prop::collection::vec((0..PREFIXES.len(), prop::collection::vec(rule_spec(), 0..6)), 0..4),
        prop::collection::vec(rule_spec(), 0..4),
        any::<bool>(),
    )
        .prop_map(|(sets, issuer, issuer_first)| Scenario { sets, issuer, issuer_first })
}

pub fn build(sc: &Scenario) -> RuleRegistry {
    let mut reg = RuleRegistry::new();
    let issuer: Vec<AlignmentRule> = sc.issuer.iter().filter_map(|r| make_rule(*r, Scope::Issuer)).collect();
    if sc.issuer_first {
        reg.register_issuer_rules(&issuer);
    }
    for (n, (prefix, rules)) in sc.sets.iter().enumerate() {
        let id = format!("http://h/rules{n}#w");
        let scope = Scope::Subweb(id.clone());
        let rs = RuleSet {
            location: format!("http://h/rules{n}"),
            subweb: Subweb::new(id, [PREFIXES[*prefix]]).unwrap(),
            rules: rules.iter().filter_map(|r| make_rule(*r, scope.clone())).collect(),
        };
        reg.register_rule_set(&rs);
    }
    if !sc.issuer_first {
        reg.register_issuer_rules(&issuer);
    }
    reg
}

pub fn category_name(c: Category) -> &'static str {
    match c {
        Category::Predicate => "predicate",
        Category::Class => "class",
        Category::Entity => "entity",
    }
}

/// Rule maps visible from `scope`, read off the accepted rule list.
pub fn visible_rules(reg: &RuleRegistry, scope: Option<&str>) -> RuleMaps {
    let mut maps: RuleMaps = HashMap::new();
    for rule in reg.rules() {
        let visible = match &rule.scope {
            Scope::Issuer => true,
            Scope::Subweb(id) => Some(id.as_str()) == scope,
        };
        if visible {
            maps.entry(category_name(rule.category()))
                .or_default()
                .insert(rule.source_term.clone(), rule.target_term.clone());
        }
    }
    maps
}

pub fn triple_strategy() -> impl Strategy<Value = SourcedTriple> {
    (0..4usize, 0..6usize, 0..2u8, 0..4usize, 0..SOURCES.len()).prop_map(|(s, p, kind, o, src)| {
        let entities = pool(Category::Entity);
        let predicates = pool(Category::Predicate);
        let predicate = if p == 5 { rdf::TYPE.to_owned() } else { predicates[p].clone() };
        let object = if predicate == rdf::TYPE {
            Term::iri(&pool(Category::Class)[o])
        } else if kind == 0 {
            Term::literal("v")
        } else {
            Term::iri(&entities[o])
        };
        SourcedTriple::new(Term::iri(&entities[s]), Term::iri(predicate), object, SOURCES[src])
    })
}
