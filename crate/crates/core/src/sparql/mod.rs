//! The SPARQL fragment: SELECT over BGPs, UNION, equality FILTERs, DISTINCT,
//! GROUP BY with COUNT, and LIMIT.

mod ast;
mod eval;
mod parser;
mod results;

pub use ast::{CompareOp, Constraint, GroupPattern, PatternTerm, Projection, Query, TriplePattern};
pub use eval::{bind, compatible, evaluate, evaluate_pattern, finish, join_order, BindingRow};
pub use parser::{parse_query, QueryParseError};
pub use results::{ResultTable, ResultsFormatError};
