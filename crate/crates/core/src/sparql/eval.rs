//! Query evaluation over an immutable snapshot.
//!
//! BGPs are evaluated as left-deep hash joins, patterns ordered by ascending
//! match count against the snapshot's indexes (ties keep text order).
//! Everything else is a straightforward multiset algebra.

use std::collections::{BTreeMap, HashMap};

use super::ast::{GroupPattern, PatternTerm, Projection, Query, TriplePattern};
use super::results::ResultTable;
use crate::rdf::vocab::xsd;
use crate::rdf::{Literal, MatchPattern, Snapshot, SourcedTriple, Term};

/// A solution mapping.
pub type BindingRow = BTreeMap<String, Term>;

/// Two rows merge iff they agree on every shared variable.
pub fn compatible(a: &BindingRow, b: &BindingRow) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().all(|(k, v)| large.get(k).is_none_or(|w| w == v))
}

fn merge(a: &BindingRow, b: &BindingRow) -> BindingRow {
    let mut out = a.clone();
    out.extend(b.iter().map(|(k, v)| (k.clone(), v.clone())));
    out
}

/// Evaluate `query` over `view` and return the canonically sorted table.
pub fn evaluate(query: &Query, view: &Snapshot) -> ResultTable {
    let rows = evaluate_pattern(&query.pattern, view);
    finish(query, rows)
}

/// Solution multiset of a group pattern.
pub fn evaluate_pattern(pattern: &GroupPattern, view: &Snapshot) -> Vec<BindingRow> {
    match pattern {
        GroupPattern::Bgp(patterns) => evaluate_bgp(patterns, view),
        GroupPattern::Join(parts) => {
            let mut acc = vec![BindingRow::new()];
            for part in parts {
                let rhs = evaluate_pattern(part, view);
                acc = join_rows(&acc, &rhs);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        GroupPattern::Union(l, r) => {
            let mut rows = evaluate_pattern(l, view);
            rows.extend(evaluate_pattern(r, view));
            rows
        }
        GroupPattern::Filtered { inner, constraint } => evaluate_pattern(inner, view)
            .into_iter()
            .filter(|row| constraint.accepts(row.get(&constraint.variable)))
            .collect(),
    }
}

fn join_rows(left: &[BindingRow], right: &[BindingRow]) -> Vec<BindingRow> {
    let mut out = Vec::new();
    for l in left {
        for r in right {
            if compatible(l, r) {
                out.push(merge(l, r));
            }
        }
    }
    out
}

fn constant_pattern(tp: &TriplePattern) -> MatchPattern {
    MatchPattern {
        subject: tp.subject.as_term().cloned(),
        predicate: tp.predicate.as_term().cloned(),
        object: tp.object.as_term().cloned(),
        source: None,
        aligned: None,
    }
}

/// Bind a stored triple against a pattern; handles repeated variables.
pub fn bind(tp: &TriplePattern, t: &SourcedTriple) -> Option<BindingRow> {
    let mut row = BindingRow::new();
    for (pt, term) in tp.positions().into_iter().zip([&t.subject, &t.predicate, &t.object]) {
        match pt {
            PatternTerm::Term(c) => {
                if c != term {
                    return None;
                }
            }
            PatternTerm::Var(v) => match row.get(v) {
                Some(existing) if existing != term => return None,
                Some(_) => {}
                None => {
                    row.insert(v.clone(), term.clone());
                }
            },
        }
    }
    Some(row)
}

/// Patterns in join order: ascending estimated cardinality, stable on ties.
pub fn join_order<'a>(patterns: &'a [TriplePattern], view: &Snapshot) -> Vec<&'a TriplePattern> {
    let mut keyed: Vec<(usize, usize, &TriplePattern)> = patterns
        .iter()
        .enumerate()
        .map(|(i, tp)| (view.count(&constant_pattern(tp)), i, tp))
        .collect();
    keyed.sort_by_key(|&(count, i, _)| (count, i));
    keyed.into_iter().map(|(_, _, tp)| tp).collect()
}

fn evaluate_bgp(patterns: &[TriplePattern], view: &Snapshot) -> Vec<BindingRow> {
    let mut rows = vec![BindingRow::new()];
    let mut bound: Vec<String> = Vec::new();
    for tp in join_order(patterns, view) {
        let mut shared: Vec<String> = tp.variables().filter(|v| bound.contains(&(*v).to_owned())).map(str::to_owned).collect();
        shared.sort();
        shared.dedup();

        let mut table: HashMap<Vec<Term>, Vec<BindingRow>> = HashMap::new();
        view.for_each_match(&constant_pattern(tp), |t| {
            if let Some(row) = bind(tp, t) {
                let key = shared.iter().map(|v| row[v].clone()).collect();
                table.entry(key).or_default().push(row);
            }
        });

        let mut next = Vec::new();
        for row in &rows {
            let key: Vec<Term> = shared.iter().map(|v| row[v].clone()).collect();
            if let Some(matches) = table.get(&key) {
                next.extend(matches.iter().map(|m| merge(row, m)));
            }
        }
        rows = next;
        for v in tp.variables() {
            if !bound.iter().any(|b| b == v) {
                bound.push(v.to_owned());
            }
        }
        if rows.is_empty() {
            break;
        }
    }
    rows
}

/// Projection, aggregation, DISTINCT, canonical ordering, LIMIT.
pub fn finish(query: &Query, rows: Vec<BindingRow>) -> ResultTable {
    let variables = query.output_variables();
    let mut out: Vec<Vec<Option<Term>>> = match &query.projection {
        Projection::All | Projection::Variables(_) => rows
            .into_iter()
            .map(|row| variables.iter().map(|v| row.get(v).cloned()).collect())
            .collect(),
        Projection::Count { key, counted, .. } => {
            let mut groups: BTreeMap<Option<Term>, u64> = BTreeMap::new();
            if key.is_none() {
                groups.insert(None, 0);
            }
            for row in &rows {
                let group = key.as_ref().and_then(|k| row.get(k).cloned());
                let n = groups.entry(group).or_default();
                if row.contains_key(counted) {
                    *n += 1;
                }
            }
            groups
                .into_iter()
                .map(|(group, n)| {
                    let count = Some(Term::Literal(Literal::typed(n.to_string(), xsd::INTEGER)));
                    match key {
                        Some(_) => vec![group, count],
                        None => vec![count],
                    }
                })
                .collect()
        }
    };
    out.sort();
    if query.distinct {
        out.dedup();
    }
    if let Some(limit) = query.limit {
        out.truncate(limit);
    }
    ResultTable { variables, rows: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparql::parse_query;

    fn triple(s: &str, p: &str, o: Term) -> SourcedTriple {
        SourcedTriple::new(Term::iri(s), Term::iri(p), o, "http://doc").with_aligned(true)
    }

    #[test]
    fn two_names() {
        let view = Snapshot::from_triples([
            triple("http://ex/a", "http://schema.org/name", Term::literal("Ann")),
            triple("http://ex/b", "http://schema.org/name", Term::literal("Bo")),
        ]);
        let q = parse_query("SELECT ?n WHERE { ?p <http://schema.org/name> ?n }").unwrap();
        let table = evaluate(&q, &view);
        assert_eq!(
            table.rows,
            vec![vec![Some(Term::literal("Ann"))], vec![Some(Term::literal("Bo"))]]
        );
    }

    #[test]
    fn unsatisfiable_join_is_empty() {
        let view = Snapshot::from_triples([
            triple("http://ex/a", "http://p", Term::iri("http://ex/b")),
            triple("http://ex/c", "http://q", Term::iri("http://ex/d")),
        ]);
        let q = parse_query("SELECT * WHERE { ?x <http://p> ?y . ?y <http://q> ?z }").unwrap();
        assert!(evaluate(&q, &view).rows.is_empty());
    }

    #[test]
    fn group_counts() {
        let mut triples = Vec::new();
        for (i, tag) in ["t1", "t1", "t1", "t2"].iter().enumerate() {
            triples.push(triple(&format!("http://ex/m{i}"), "http://tag", Term::iri(format!("http://ex/{tag}"))));
        }
        let view = Snapshot::from_triples(triples);
        let q = parse_query("SELECT ?t (COUNT(?m) AS ?c) WHERE { ?m <http://tag> ?t } GROUP BY ?t").unwrap();
        let table = evaluate(&q, &view);
        let int = |n: &str| Some(Term::Literal(Literal::typed(n, xsd::INTEGER)));
        assert_eq!(
            table.rows,
            vec![
                vec![Some(Term::iri("http://ex/t1")), int("3")],
                vec![Some(Term::iri("http://ex/t2")), int("1")],
            ]
        );
    }

    #[test]
    fn empty_view() {
        let q = parse_query("SELECT ?n WHERE { ?p <http://schema.org/name> ?n }").unwrap();
        assert!(evaluate(&q, &Snapshot::default()).rows.is_empty());
        let count = parse_query("SELECT (COUNT(?n) AS ?c) WHERE { ?p <http://schema.org/name> ?n }").unwrap();
        assert_eq!(evaluate(&count, &Snapshot::default()).rows.len(), 1);
    }

    #[test]
    fn repeated_variable_in_pattern() {
        let view = Snapshot::from_triples([
            triple("http://ex/a", "http://p", Term::iri("http://ex/a")),
            triple("http://ex/a", "http://p", Term::iri("http://ex/b")),
        ]);
        let q = parse_query("SELECT ?x WHERE { ?x <http://p> ?x }").unwrap();
        assert_eq!(evaluate(&q, &view).rows, vec![vec![Some(Term::iri("http://ex/a"))]]);
    }

    #[test]
    fn union_rows_may_leave_variables_unbound() {
        let view = Snapshot::from_triples([
            triple("http://ex/a", "http://p", Term::literal("x")),
            triple("http://ex/b", "http://q", Term::literal("y")),
        ]);
        let q = parse_query("SELECT ?s ?o ?w WHERE { { ?s <http://p> ?o } UNION { ?s <http://q> ?w } }").unwrap();
        let table = evaluate(&q, &view);
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows.iter().any(|r| r[2].is_none()));
    }

    #[test]
    fn distinct_and_limit_apply_after_sorting() {
        let view = Snapshot::from_triples([
            triple("http://ex/c", "http://p", Term::literal("x")),
            SourcedTriple::new(Term::iri("http://ex/c"), Term::iri("http://p"), Term::literal("x"), "http://other")
                .with_aligned(true),
            triple("http://ex/a", "http://p", Term::literal("x")),
        ]);
        let all = parse_query("SELECT ?s WHERE { ?s <http://p> ?o }").unwrap();
        assert_eq!(evaluate(&all, &view).rows.len(), 3);
        let q = parse_query("SELECT DISTINCT ?s WHERE { ?s <http://p> ?o } LIMIT 1").unwrap();
        assert_eq!(evaluate(&q, &view).rows, vec![vec![Some(Term::iri("http://ex/a"))]]);
    }
}
