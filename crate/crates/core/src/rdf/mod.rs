//! RDF data model, triple store, and Turtle/N-Triples syntax.

mod ntriples;
mod store;
mod term;
mod turtle;
pub mod vocab;

pub use ntriples::serialize_ntriples;
pub use store::{MatchPattern, Snapshot, TripleStore};
pub use term::{has_scheme, source_digest, strip_fragment, Literal, SourcedTriple, Term};
pub use turtle::{parse_turtle, resolve_iri, Document, TurtleError};
