#![allow(dead_code)]

use ltqp_align::rdf::vocab::xsd;
use ltqp_align::rdf::{Literal, MatchPattern, SourcedTriple, Term};
use ltqp_align::sparql::{CompareOp, Constraint, GroupPattern, PatternTerm, Projection, Query, TriplePattern};
use proptest::prelude::*;

pub fn iri_term() -> impl Strategy<Value = Term> {
    (0..5u8).prop_map(|i| Term::iri(format!("http://ex.org/n{i}")))
}

pub fn predicate() -> impl Strategy<Value = Term> {
    (0..3u8).prop_map(|i| Term::iri(format!("http://ex.org/p{i}")))
}

pub fn object() -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => iri_term(),
        1 => (0..3u8).prop_map(|i| Term::literal(format!("v{i}"))),
        1 => (0..2u8).prop_map(|i| Term::Literal(Literal::typed(i.to_string(), xsd::INTEGER))),
        1 => (0..2u8).prop_map(|i| Term::Literal(Literal::lang("hi", if i == 0 { "en" } else { "fr" }))),
        1 => (0..2u8).prop_map(|i| Term::blank(format!("b{i}"))),
    ]
}

pub fn source() -> impl Strategy<Value = String> {
    (0..3u8).prop_map(|i| format!("http://ex.org/doc{i}"))
}

pub fn triple() -> impl Strategy<Value = SourcedTriple> {
    (
        prop_oneof![4 => iri_term(), 1 => (0..2u8).prop_map(|i| Term::blank(format!("b{i}")))],
        predicate(),
        object(),
        source(),
        any::<bool>(),
    )
        .prop_map(|(s, p, o, src, aligned)| SourcedTriple::new(s, p, o, src).with_aligned(aligned))
}

pub fn triples(max: usize) -> impl Strategy<Value = Vec<SourcedTriple>> {
    prop::collection::vec(triple(), 0..=max)
}

pub fn match_pattern() -> impl Strategy<Value = MatchPattern> {
    (
        prop::option::of(iri_term()),
        prop::option::of(predicate()),
        prop::option::of(object()),
        prop::option::of(source()),
        prop::option::of(any::<bool>()),
    )
        .prop_map(|(subject, predicate, object, source, aligned)| MatchPattern {
            subject,
            predicate,
            object,
            source,
            aligned,
        })
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn var() -> impl Strategy<Value = PatternTerm> {
    (0..3usize).prop_map(|i| PatternTerm::var(VARS[i]))
}

pub fn triple_pattern() -> impl Strategy<Value = TriplePattern> {
    (
        prop_oneof![3 => var(), 1 => iri_term().prop_map(PatternTerm::Term)],
        prop_oneof![1 => var(), 3 => predicate().prop_map(PatternTerm::Term)],
        prop_oneof![3 => var(), 1 => object().prop_map(PatternTerm::Term)],
    )
        .prop_map(|(s, p, o)| TriplePattern::new(s, p, o))
}

pub fn bgp(max: usize) -> impl Strategy<Value = Vec<TriplePattern>> {
    prop::collection::vec(triple_pattern(), 1..=max)
}

/// Randomized queries with at most three triple patterns in total.
pub fn query() -> impl Strategy<Value = Query> {
    let body = prop_oneof![
        2 => bgp(3).prop_map(GroupPattern::Bgp),
        1 => (bgp(2), bgp(1)).prop_map(|(l, r)| GroupPattern::Union(Box::new(GroupPattern::Bgp(l)), Box::new(GroupPattern::Bgp(r)))),
        1 => (bgp(1), bgp(1), bgp(1)).prop_map(|(a, l, r)| GroupPattern::Join(vec![
            GroupPattern::Bgp(a),
            GroupPattern::Union(Box::new(GroupPattern::Bgp(l)), Box::new(GroupPattern::Bgp(r))),
        ])),
    ];
    (
        body,
        prop::option::of((0..3usize, any::<bool>(), object())),
        0..4u8,
        any::<bool>(),
        prop::option::of(1..6usize),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(pattern, filter, shape, distinct, limit, i1, i2)| {
            let mut pattern = pattern;
            let vars = pattern.variables();
            if let Some((v, eq, value)) = filter {
                pattern = GroupPattern::Filtered {
                    inner: Box::new(pattern),
                    constraint: Constraint {
                        variable: VARS[v].to_owned(),
                        op: if eq { CompareOp::Eq } else { CompareOp::Ne },
                        value,
                    },
                };
            }
            let (projection, group_by) = if vars.is_empty() {
                (Projection::All, None)
            } else {
                match shape {
                    0 => (Projection::All, None),
                    1 => (Projection::Variables(vec![i1.get(&vars).clone()]), None),
                    2 => {
                        let key = i1.get(&vars).clone();
                        (
                            Projection::Count {
                                key: Some(key.clone()),
                                counted: i2.get(&vars).clone(),
                                alias: "c".into(),
                            },
                            Some(key),
                        )
                    }
                    _ => (
                        Projection::Count {
                            key: None,
                            counted: i2.get(&vars).clone(),
                            alias: "c".into(),
                        },
                        None,
                    ),
                }
            };
            Query {
                projection,
                distinct,
                pattern,
                group_by,
                limit,
            }
        })
}
