use std::collections::BTreeSet;
use std::fmt;

use crate::rdf::Term;

/// A term or a variable in a triple pattern position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Term(Term),
    Var(String),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            PatternTerm::Term(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Term(t) => write!(f, "{t}"),
            PatternTerm::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        Self {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.positions().into_iter().filter_map(PatternTerm::as_var)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
}

/// `FILTER(?variable = value)` or `FILTER(?variable != value)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub variable: String,
    pub op: CompareOp,
    pub value: Term,
}

impl Constraint {
    /// An unbound variable fails both comparisons.
    pub fn accepts(&self, bound: Option<&Term>) -> bool {
        match (bound, self.op) {
            (None, _) => false,
            (Some(t), CompareOp::Eq) => *t == self.value,
            (Some(t), CompareOp::Ne) => *t != self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupPattern {
    Bgp(Vec<TriplePattern>),
    /// Several group elements side by side, e.g. a BGP next to a UNION.
    Join(Vec<GroupPattern>),
    Union(Box<GroupPattern>, Box<GroupPattern>),
    Filtered {
        inner: Box<GroupPattern>,
        constraint: Constraint,
    },
}

impl GroupPattern {
    /// Variables in first-appearance order.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_patterns(&mut |tp| {
            for v in tp.variables() {
                if seen.insert(v.to_owned()) {
                    out.push(v.to_owned());
                }
            }
        });
        out
    }

    pub fn visit_patterns<'a>(&'a self, f: &mut impl FnMut(&'a TriplePattern)) {
        match self {
            GroupPattern::Bgp(patterns) => patterns.iter().for_each(f),
            GroupPattern::Join(parts) => parts.iter().for_each(|p| p.visit_patterns(f)),
            GroupPattern::Union(l, r) => {
                l.visit_patterns(f);
                r.visit_patterns(f);
            }
            GroupPattern::Filtered { inner, .. } => inner.visit_patterns(f),
        }
    }

    pub fn triple_patterns(&self) -> Vec<&TriplePattern> {
        let mut out = Vec::new();
        self.visit_patterns(&mut |tp| out.push(tp));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Projection {
    /// `SELECT *`
    All,
    Variables(Vec<String>),
    /// `SELECT [?key] (COUNT(?counted) AS ?alias)`
    Count {
        key: Option<String>,
        counted: String,
        alias: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub projection: Projection,
    pub distinct: bool,
    pub pattern: GroupPattern,
    pub group_by: Option<String>,
    pub limit: Option<usize>,
}

impl Query {
    /// Output column names in order.
    pub fn output_variables(&self) -> Vec<String> {
        match &self.projection {
            Projection::All => self.pattern.variables(),
            Projection::Variables(vars) => vars.clone(),
            Projection::Count { key, alias, .. } => key.iter().chain([alias]).cloned().collect(),
        }
    }
}
