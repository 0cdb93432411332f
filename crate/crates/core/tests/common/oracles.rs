//! Brute-force reference implementations, independent of the library's
//! indexes, join planner and rewrite graph.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ltqp_align::rdf::vocab::{rdf, xsd};
use ltqp_align::rdf::{Literal, MatchPattern, SourcedTriple, Term};
use ltqp_align::sparql::{GroupPattern, PatternTerm, Projection, Query, TriplePattern};

pub type Row = BTreeMap<String, Term>;

/// Linear scan over all tuples.
pub fn scan_match(triples: &[SourcedTriple], p: &MatchPattern) -> Vec<SourcedTriple> {
    let mut out: Vec<SourcedTriple> = triples
        .iter()
        .filter(|t| {
            p.subject.as_ref().is_none_or(|s| *s == t.subject)
                && p.predicate.as_ref().is_none_or(|x| *x == t.predicate)
                && p.object.as_ref().is_none_or(|o| *o == t.object)
                && p.source.as_ref().is_none_or(|s| *s == t.source)
                && p.aligned.is_none_or(|a| a == t.aligned)
        })
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

fn unify(tp: &TriplePattern, t: &SourcedTriple, row: &mut Row) -> bool {
    for (pt, term) in [(&tp.subject, &t.subject), (&tp.predicate, &t.predicate), (&tp.object, &t.object)] {
        match pt {
            PatternTerm::Term(c) if c != term => return false,
            PatternTerm::Term(_) => {}
            PatternTerm::Var(v) => match row.get(v) {
                Some(bound) if bound != term => return false,
                Some(_) => {}
                None => {
                    row.insert(v.clone(), term.clone());
                }
            },
        }
    }
    true
}

/// Every tuple of triples, one per pattern, that unifies consistently.
fn enumerate_bgp(patterns: &[TriplePattern], view: &[SourcedTriple]) -> Vec<Row> {
    let mut out = Vec::new();
    let mut choice = vec![0usize; patterns.len()];
    if patterns.is_empty() {
        return vec![Row::new()];
    }
    if view.is_empty() {
        return out;
    }
    loop {
        let mut row = Row::new();
        if patterns.iter().zip(&choice).all(|(tp, &i)| unify(tp, &view[i], &mut row)) {
            out.push(row);
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < view.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn agree(a: &Row, b: &Row) -> bool {
    a.iter().all(|(k, v)| b.get(k).is_none_or(|w| w == v))
}

pub fn enumerate(pattern: &GroupPattern, view: &[SourcedTriple]) -> Vec<Row> {
    match pattern {
        GroupPattern::Bgp(ps) => enumerate_bgp(ps, view),
        GroupPattern::Join(parts) => parts.iter().fold(vec![Row::new()], |acc, part| {
            let rhs = enumerate(part, view);
            let mut out = Vec::new();
            for a in &acc {
                for b in &rhs {
                    if agree(a, b) {
                        let mut m = a.clone();
                        m.extend(b.clone());
                        out.push(m);
                    }
                }
            }
            out
        }),
        GroupPattern::Union(l, r) => {
            let mut rows = enumerate(l, view);
            rows.extend(enumerate(r, view));
            rows
        }
        GroupPattern::Filtered { inner, constraint } => enumerate(inner, view)
            .into_iter()
            .filter(|row| constraint.accepts(row.get(&constraint.variable)))
            .collect(),
    }
}

/// Reference evaluation: rows as sorted vectors of optional terms.
pub fn brute_force(query: &Query, view: &[SourcedTriple]) -> Vec<Vec<Option<Term>>> {
    let rows = enumerate(&query.pattern, view);
    let mut out: Vec<Vec<Option<Term>>> = match &query.projection {
        Projection::Count { key, counted, .. } => {
            let mut counts: Vec<(Option<Term>, u64)> = Vec::new();
            if key.is_none() {
                counts.push((None, 0));
            }
            for row in &rows {
                let k = key.as_ref().and_then(|k| row.get(k).cloned());
                let idx = match counts.iter().position(|(g, _)| *g == k) {
                    Some(i) => i,
                    None => {
                        counts.push((k, 0));
                        counts.len() - 1
                    }
                };
                if row.contains_key(counted) {
                    counts[idx].1 += 1;
                }
            }
            counts
                .into_iter()
                .map(|(g, n)| {
                    let c = Some(Term::Literal(Literal::typed(n.to_string(), xsd::INTEGER)));
                    if key.is_some() {
                        vec![g, c]
                    } else {
                        vec![c]
                    }
                })
                .collect()
        }
        _ => {
            let vars = query.output_variables();
            rows.iter().map(|r| vars.iter().map(|v| r.get(v).cloned()).collect()).collect()
        }
    };
    out.sort();
    if query.distinct {
        let mut seen = BTreeSet::new();
        out.retain(|r| seen.insert(r.clone()));
    }
    if let Some(n) = query.limit {
        out.truncate(n);
    }
    out
}

pub type RuleMaps = HashMap<&'static str, HashMap<String, String>>;

/// Apply single rewrite steps (category → source → target) until nothing
/// changes. Returns the result and the number of steps taken.
pub fn rewrite_to_fixpoint(rules: &RuleMaps, t: &SourcedTriple) -> (SourcedTriple, usize) {
    let mut t = t.clone();
    let mut steps = 0;
    let look = |cat: &str, term: &Term| -> Option<Term> {
        let iri = term.as_iri()?;
        rules.get(cat)?.get(iri).map(Term::iri)
    };
    loop {
        let mut changed = false;
        if let Some(s) = look("entity", &t.subject) {
            t.subject = s;
            changed = true;
            steps += 1;
        }
        if let Some(p) = look("predicate", &t.predicate) {
            t.predicate = p;
            changed = true;
            steps += 1;
        }
        let cat = if t.predicate.as_iri() == Some(rdf::TYPE) { "class" } else { "entity" };
        if let Some(o) = look(cat, &t.object) {
            t.object = o;
            changed = true;
            steps += 1;
        }
        if !changed {
            t.aligned = true;
            return (t, steps);
        }
        assert!(steps < 100_000, "no fixpoint");
    }
}

/// Depth-first search for a directed cycle.
pub fn has_cycle(edges: &[(String, String)]) -> bool {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
    }
    fn visit<'a>(
        n: &'a str,
        adj: &HashMap<&'a str, Vec<&'a str>>,
        state: &mut HashMap<&'a str, u8>,
    ) -> bool {
        match state.get(n) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        state.insert(n, 1);
        for m in adj.get(n).into_iter().flatten() {
            if visit(m, adj, state) {
                return true;
            }
        }
        state.insert(n, 2);
        false
    }
    let mut state = HashMap::new();
    adj.keys().any(|n| visit(n, &adj, &mut state))
}

/// Whether some prefix of one set is a string prefix of some prefix of the other.
pub fn prefix_sets_overlap<'a>(a: impl IntoIterator<Item = &'a String>, b: &[&'a String]) -> bool {
    a.into_iter().any(|x| b.iter().any(|y| x.starts_with(y.as_str()) || y.starts_with(x.as_str())))
}
