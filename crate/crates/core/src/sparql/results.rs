//! Result tables and their SPARQL JSON / CSV / text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{Literal, Term};

/// Query results, rows in canonical order. `None` is an unbound cell.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultTable {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

#[derive(Debug, thiserror::Error)]
#[error("invalid SPARQL JSON results: {0}")]
pub struct ResultsFormatError(String);

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Re-establish canonical row order.
    pub fn sort(&mut self) {
        self.rows.sort();
    }

    /// Whether every row of `self` occurs in `other` with at least the same
    /// multiplicity. Both tables must be sorted.
    pub fn is_submultiset_of(&self, other: &ResultTable) -> bool {
        let mut it = other.rows.iter();
        'outer: for row in &self.rows {
            for candidate in it.by_ref() {
                match candidate.cmp(row) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn to_sparql_json(&self) -> Value {
        let bindings: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (var, cell) in self.variables.iter().zip(row) {
                    if let Some(term) = cell {
                        obj.insert(var.clone(), term_to_json(term));
                    }
                }
                Value::Object(obj)
            })
            .collect();
        json!({
            "head": { "vars": self.variables },
            "results": { "bindings": bindings },
        })
    }

    pub fn from_sparql_json(value: &Value) -> Result<Self, ResultsFormatError> {
        let err = |m: &str| ResultsFormatError(m.to_owned());
        let variables: Vec<String> = value
            .pointer("/head/vars")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing head.vars"))?
            .iter()
            .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| err("non-string variable")))
            .collect::<Result<_, _>>()?;
        let bindings = value
            .pointer("/results/bindings")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing results.bindings"))?;
        let mut rows = Vec::with_capacity(bindings.len());
        for binding in bindings {
            let obj = binding.as_object().ok_or_else(|| err("binding is not an object"))?;
            let row = variables
                .iter()
                .map(|v| obj.get(v).map(term_from_json).transpose())
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self { variables, rows })
    }

    /// SPARQL 1.1 CSV results (CRLF line endings).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.variables.iter().map(|v| csv_field(v)).collect::<Vec<_>>().join(","));
        out.push_str("\r\n");
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    None => String::new(),
                    Some(Term::BlankNode(b)) => csv_field(&format!("_:{b}")),
                    Some(t) => csv_field(t.value()),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push_str("\r\n");
        }
        out
    }

    /// Human-readable fixed-width table.
    pub fn to_text_table(&self) -> String {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.as_ref().map(Term::to_string).unwrap_or_default()).collect())
            .collect();
        let mut widths: Vec<usize> = self.variables.iter().map(|v| v.len() + 1).collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let header: Vec<String> = self
            .variables
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{:<w$}", format!("?{v}"), w = *w))
            .collect();
        let _ = writeln!(out, "{}", header.join(" | ").trim_end());
        let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
        for row in &rendered {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
            let _ = writeln!(out, "{}", line.join(" | ").trim_end());
        }
        let _ = writeln!(out, "({} rows)", self.rows.len());
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn term_to_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({ "type": "uri", "value": iri }),
        Term::BlankNode(b) => json!({ "type": "bnode", "value": b }),
        Term::Literal(lit) => {
            let mut obj = Map::new();
            obj.insert("type".into(), "literal".into());
            obj.insert("value".into(), lit.lexical.clone().into());
            if let Some(lang) = &lit.language {
                obj.insert("xml:lang".into(), lang.clone().into());
            } else if lit.datatype != xsd::STRING {
                obj.insert("datatype".into(), lit.datatype.clone().into());
            }
            Value::Object(obj)
        }
    }
}

fn term_from_json(value: &Value) -> Result<Term, ResultsFormatError> {
    let field = |k: &str| value.get(k).and_then(Value::as_str);
    let v = field("value").ok_or_else(|| ResultsFormatError("term without value".into()))?;
    match field("type") {
        Some("uri") => Ok(Term::iri(v)),
        Some("bnode") => Ok(Term::blank(v)),
        Some("literal") | Some("typed-literal") => Ok(Term::Literal(match (field("xml:lang"), field("datatype")) {
            (Some(lang), _) => Literal {
                lexical: v.to_owned(),
                datatype: rdf::LANG_STRING.to_owned(),
                language: Some(lang.to_owned()),
            },
            (None, Some(dt)) => Literal::typed(v, dt),
            (None, None) => Literal::simple(v),
        })),
        other => Err(ResultsFormatError(format!("unknown term type {other:?}"))),
    }
}

impl Serialize for ResultTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_sparql_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ResultTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        ResultTable::from_sparql_json(&value).map_err(serde::de::Error::custom)
    }
}
