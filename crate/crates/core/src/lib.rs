//! Link-traversal SPARQL query processing with online schema alignment.

pub mod alignment;
pub mod fixture;
pub mod parallel;
pub mod rdf;
pub mod source;
pub mod sparql;
pub mod traversal;
