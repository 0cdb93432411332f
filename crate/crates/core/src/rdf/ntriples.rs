//! Canonical N-Triples output.

use std::collections::BTreeSet;

use super::term::{SourcedTriple, Term};

/// One line per distinct (s, p, o), sorted by canonical term order,
/// LF-terminated. Provenance is dropped.
pub fn serialize_ntriples<'a>(triples: impl IntoIterator<Item = &'a SourcedTriple>) -> String {
    let distinct: BTreeSet<(&Term, &Term, &Term)> = triples.into_iter().map(SourcedTriple::spo).collect();
    let mut out = String::new();
    for (s, p, o) in distinct {
        out.push_str(&format!("{s} {p} {o} .\n"));
    }
    out
}
