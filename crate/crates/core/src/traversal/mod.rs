//! The link-traversal loop.

mod config;
mod engine;
mod frontier;
mod report;

pub use config::{default_skip_list, ConfigError, Policy, TraversalConfig, DEFAULT_MAX_DOCUMENTS, DEFAULT_TIMEOUT, DEFAULT_WORKERS};
pub use engine::{execute, execute_with_observer, policy_candidates, Traversal};
pub use frontier::{FetchClass, Frontier};
pub use report::{
    duration_ms, event_order_ok, ExecutionObserver, ExecutionReport, FetchedDocument, NoObserver, ProgressEvent,
    RuleSetSummary, TerminationCause,
};
