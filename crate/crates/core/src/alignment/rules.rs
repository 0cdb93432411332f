//! Subwebs, alignment rules, and the rule-set document vocabulary.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::vocab::{rdf, semmap};
use crate::rdf::{has_scheme, Document, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignmentError {
    #[error("malformed rule set <{location}>: {reason}")]
    MalformedRuleSet { location: String, reason: String },
    #[error("invalid issuer rules: {0}")]
    InvalidIssuerRules(String),
    #[error("invalid subweb: {0}")]
    InvalidSubweb(String),
}

/// A provider-controlled region of the web, given as IRI prefixes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subweb {
    pub id: String,
    pub prefixes: BTreeSet<String>,
}

impl Subweb {
    pub fn new(
        id: impl Into<String>,
        prefixes: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, AlignmentError> {
        let prefixes: BTreeSet<String> = prefixes.into_iter().map(Into::into).collect();
        if prefixes.is_empty() {
            return Err(AlignmentError::InvalidSubweb("no prefixes".into()));
        }
        if prefixes.iter().any(String::is_empty) {
            return Err(AlignmentError::InvalidSubweb("empty prefix".into()));
        }
        Ok(Self { id: id.into(), prefixes })
    }

    /// Whether the document IRI lies inside this subweb.
    pub fn contains(&self, doc: &str) -> bool {
        self.prefixes.iter().any(|p| doc.starts_with(p.as_str()))
    }

    pub fn overlaps(&self, other: &Subweb) -> bool {
        self.prefixes
            .iter()
            .any(|a| other.prefixes.iter().any(|b| a.starts_with(b.as_str()) || b.starts_with(a.as_str())))
    }
}

pub fn subweb_contains(w: &Subweb, doc: &str) -> bool {
    w.contains(doc)
}

pub fn subwebs_overlap(a: &Subweb, b: &Subweb) -> bool {
    a.overlaps(b)
}

/// Which kind of term a rule rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Category {
    Predicate,
    Class,
    Entity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    PredicateEquivalence,
    PredicateSpecialization,
    ClassEquivalence,
    ClassSpecialization,
    EntityIdentity,
}

impl Relation {
    pub const ALL: [Relation; 5] = [
        Relation::PredicateEquivalence,
        Relation::PredicateSpecialization,
        Relation::ClassEquivalence,
        Relation::ClassSpecialization,
        Relation::EntityIdentity,
    ];

    pub fn iri(self) -> &'static str {
        match self {
            Relation::PredicateEquivalence => semmap::EQUIVALENT_PROPERTY,
            Relation::PredicateSpecialization => semmap::SUB_PROPERTY_OF,
            Relation::ClassEquivalence => semmap::EQUIVALENT_CLASS,
            Relation::ClassSpecialization => semmap::SUB_CLASS_OF,
            Relation::EntityIdentity => semmap::SAME_AS,
        }
    }

    pub fn category(self) -> Category {
        match self {
            Relation::PredicateEquivalence | Relation::PredicateSpecialization => Category::Predicate,
            Relation::ClassEquivalence | Relation::ClassSpecialization => Category::Class,
            Relation::EntityIdentity => Category::Entity,
        }
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.iri() == iri)
    }

    /// Accepts the relation IRI, its local name, or the kebab-case kind name.
    pub fn parse(s: &str) -> Option<Self> {
        Self::from_iri(s).or_else(|| {
            Self::ALL.into_iter().find(|r| {
                r.iri().strip_prefix(semmap::NS) == Some(s) || r.kind_name() == s
            })
        })
    }

    pub fn kind_name(self) -> &'static str {
        match self {
            Relation::PredicateEquivalence => "predicate-equivalence",
            Relation::PredicateSpecialization => "predicate-specialization",
            Relation::ClassEquivalence => "class-equivalence",
            Relation::ClassSpecialization => "class-specialization",
            Relation::EntityIdentity => "entity-identity",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", content = "subweb")]
pub enum Scope {
    /// Scoped to the subweb with this id.
    Subweb(String),
    /// Supplied by the query issuer; applies everywhere.
    Issuer,
}

/// A directional term rewrite `source_term → target_term`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlignmentRule {
    pub source_term: String,
    pub relation: Relation,
    pub target_term: String,
    pub scope: Scope,
    pub origin_document: String,
    pub ordinal: u64,
}

impl AlignmentRule {
    pub fn category(&self) -> Category {
        self.relation.category()
    }
}

impl fmt::Display for AlignmentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> {} <{}>", self.source_term, self.relation, self.target_term)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleSet {
    pub location: String,
    pub subweb: Subweb,
    pub rules: Vec<AlignmentRule>,
}

/// Read the subweb declaration and mappings out of a rule-set document.
pub fn parse_rule_set(doc: &Document) -> Result<RuleSet, AlignmentError> {
    let malformed = |reason: String| AlignmentError::MalformedRuleSet {
        location: doc.iri.clone(),
        reason,
    };
    let rdf_type = Term::iri(rdf::TYPE);

    let mut by_subject: HashMap<&Term, Vec<(&Term, &Term)>> = HashMap::new();
    let mut subject_order: Vec<&Term> = Vec::new();
    for t in &doc.triples {
        let entry = by_subject.entry(&t.subject).or_insert_with(|| {
            subject_order.push(&t.subject);
            Vec::new()
        });
        entry.push((&t.predicate, &t.object));
    }
    let typed = |class: &str| -> Vec<&Term> {
        let class = Term::iri(class);
        subject_order
            .iter()
            .copied()
            .filter(|s| by_subject[s].iter().any(|(p, o)| **p == rdf_type && **o == class))
            .collect()
    };
    let values = |subject: &Term, predicate: &str| -> Vec<&Term> {
        let predicate = Term::iri(predicate);
        by_subject
            .get(subject)
            .map(|pos| pos.iter().filter(|(p, _)| **p == predicate).map(|(_, o)| *o).collect())
            .unwrap_or_default()
    };

    let subweb_nodes = typed(semmap::SUBWEB);
    let subweb_node = match subweb_nodes.as_slice() {
        [] => return Err(malformed("no semmap:Subweb declared".into())),
        [one] => *one,
        _ => return Err(malformed("more than one semmap:Subweb declared".into())),
    };
    let Term::Iri(subweb_id) = subweb_node else {
        return Err(malformed("the subweb must be identified by an IRI".into()));
    };
    let mut prefixes = Vec::new();
    for value in values(subweb_node, semmap::IRI_PREFIX) {
        match value {
            Term::Literal(lit) if has_scheme(&lit.lexical) => prefixes.push(lit.lexical.clone()),
            Term::Literal(lit) => return Err(malformed(format!("relative subweb prefix \"{}\"", lit.lexical))),
            other => return Err(malformed(format!("subweb prefix {other} is not a literal"))),
        }
    }
    if prefixes.is_empty() {
        return Err(malformed("subweb declares no semmap:iriPrefix".into()));
    }
    let subweb = Subweb::new(subweb_id.clone(), prefixes).map_err(|e| malformed(e.to_string()))?;

    let mut rules = Vec::new();
    for (ordinal, mapping) in typed(semmap::MAPPING).into_iter().enumerate() {
        let single_iri = |predicate: &str| -> Result<String, AlignmentError> {
            match values(mapping, predicate).as_slice() {
                [Term::Iri(iri)] => Ok(iri.clone()),
                [] => Err(malformed(format!("mapping {mapping} lacks <{predicate}>"))),
                [other] => Err(malformed(format!("mapping {mapping}: <{predicate}> value {other} is not an IRI"))),
                _ => Err(malformed(format!("mapping {mapping} has several <{predicate}> values"))),
            }
        };
        let source_term = single_iri(semmap::SUBJECT_ID)?;
        let target_term = single_iri(semmap::OBJECT_ID)?;
        let relation_iri = single_iri(semmap::MAPPING_RELATION)?;
        let scope = single_iri(semmap::SCOPE)?;
        let relation = Relation::from_iri(&relation_iri)
            .ok_or_else(|| malformed(format!("unknown mapping relation <{relation_iri}>")))?;
        if scope != subweb.id {
            return Err(malformed(format!("mapping {mapping} is scoped to <{scope}>, not the declared subweb")));
        }
        if source_term == target_term {
            return Err(malformed(format!("mapping {mapping} maps <{source_term}> onto itself")));
        }
        rules.push(AlignmentRule {
            source_term,
            relation,
            target_term,
            scope: Scope::Subweb(subweb.id.clone()),
            origin_document: doc.iri.clone(),
            ordinal: ordinal as u64,
        });
    }
    Ok(RuleSet {
        location: doc.iri.clone(),
        subweb,
        rules,
    })
}

/// Wire form of an issuer rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerRuleSpec {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl IssuerRuleSpec {
    pub fn to_rule(&self, ordinal: u64) -> Result<AlignmentRule, AlignmentError> {
        let invalid = |m: String| AlignmentError::InvalidIssuerRules(m);
        for iri in [&self.subject, &self.object] {
            if !has_scheme(iri) {
                return Err(invalid(format!("<{iri}> is not an absolute IRI")));
            }
        }
        if self.subject == self.object {
            return Err(invalid(format!("<{}> is mapped onto itself", self.subject)));
        }
        let relation =
            Relation::parse(&self.relation).ok_or_else(|| invalid(format!("unknown relation '{}'", self.relation)))?;
        Ok(AlignmentRule {
            source_term: self.subject.clone(),
            relation,
            target_term: self.object.clone(),
            scope: Scope::Issuer,
            origin_document: "issuer".into(),
            ordinal,
        })
    }
}

impl From<&AlignmentRule> for IssuerRuleSpec {
    fn from(rule: &AlignmentRule) -> Self {
        Self {
            subject: rule.source_term.clone(),
            relation: rule.relation.iri().to_owned(),
            object: rule.target_term.clone(),
        }
    }
}

/// Parse the JSON issuer-rule document: an array of `{subject, relation, object}`.
pub fn parse_issuer_rules(json: &str) -> Result<Vec<AlignmentRule>, AlignmentError> {
    let specs: Vec<IssuerRuleSpec> =
        serde_json::from_str(json).map_err(|e| AlignmentError::InvalidIssuerRules(e.to_string()))?;
    issuer_rules_from_specs(&specs)
}

pub fn issuer_rules_from_specs(specs: &[IssuerRuleSpec]) -> Result<Vec<AlignmentRule>, AlignmentError> {
    specs.iter().enumerate().map(|(i, s)| s.to_rule(i as u64)).collect()
}
