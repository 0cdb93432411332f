//! Subweb-scoped alignment rules and their application.

mod registry;
mod rules;

pub use registry::{
    ApplicationTrace, Position, Registration, RejectReason, RejectedItem, Rejection, RuleRegistry, RuleStatus,
    TraceStep,
};
pub use rules::{
    issuer_rules_from_specs, parse_issuer_rules, parse_rule_set, subweb_contains, subwebs_overlap, AlignmentError,
    AlignmentRule, Category, IssuerRuleSpec, Relation, RuleSet, Scope, Subweb,
};
