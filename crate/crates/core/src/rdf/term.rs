//! RDF terms and sourced triples.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::vocab::{rdf, xsd};

/// An RDF term.
///
/// The derived ordering is the canonical one: IRIs sort before blank nodes,
/// which sort before literals; within a kind, fields compare lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    pub datatype: String,
    pub language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: xsd::STRING.to_owned(),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: datatype.into(),
            language: None,
        }
    }

    /// Language tags are normalized to lower case.
    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: rdf::LANG_STRING.to_owned(),
            language: Some(language.into().to_ascii_lowercase()),
        }
    }
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode(label.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::simple(lexical))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Kind name used by the SPARQL JSON results format.
    pub fn kind(&self) -> &'static str {
        match self {
            Term::Iri(_) => "uri",
            Term::BlankNode(_) => "bnode",
            Term::Literal(_) => "literal",
        }
    }

    /// The bare value: IRI text, blank node label, or lexical form.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(v) | Term::BlankNode(v) => v,
            Term::Literal(l) => &l.lexical,
        }
    }
}

impl fmt::Display for Term {
    /// N-Triples syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{}>", escape_iri(iri)),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => {
                write!(f, "\"{}\"", escape_string(&lit.lexical))?;
                if let Some(lang) = &lit.language {
                    write!(f, "@{lang}")
                } else if lit.datatype != xsd::STRING {
                    write!(f, "^^<{}>", escape_iri(&lit.datatype))
                } else {
                    Ok(())
                }
            }
        }
    }
}

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}

fn escape_iri(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                out.push_str(&format!("\\u{:04X}", c as u32))
            }
            c if (c as u32) <= 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// A triple tagged with the document it came from and whether it is the
/// aligned (rewritten) form or the original as published.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourcedTriple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
    pub source: String,
    pub aligned: bool,
}

impl SourcedTriple {
    pub fn new(subject: Term, predicate: Term, object: Term, source: impl Into<String>) -> Self {
        debug_assert!(predicate.is_iri(), "predicate must be an IRI");
        Self {
            subject,
            predicate,
            object,
            source: source.into(),
            aligned: false,
        }
    }

    pub fn with_aligned(mut self, aligned: bool) -> Self {
        self.aligned = aligned;
        self
    }

    /// The (s, p, o) part, ignoring provenance.
    pub fn spo(&self) -> (&Term, &Term, &Term) {
        (&self.subject, &self.predicate, &self.object)
    }

    /// Prefix blank node labels with a digest of the source IRI so labels
    /// from different documents cannot collide once merged into one store.
    pub fn scope_blank_nodes(mut self) -> Self {
        let tag = source_digest(&self.source);
        for term in [&mut self.subject, &mut self.object] {
            if let Term::BlankNode(label) = term {
                *label = format!("{tag}_{label}");
            }
        }
        self
    }
}

/// Short hex digest of a document IRI, used to scope blank node labels.
pub fn source_digest(source: &str) -> String {
    let digest = Sha256::digest(source.as_bytes());
    digest[..4].iter().map(|b| format!("{b:02x}")).collect::<String>()
}

/// Whether `s` starts with an RFC 3986 scheme.
pub fn has_scheme(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Strip the fragment part of an IRI.
pub fn strip_fragment(iri: &str) -> &str {
    match iri.find('#') {
        Some(pos) => &iri[..pos],
        None => iri,
    }
}
