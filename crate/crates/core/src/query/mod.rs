//! SPARQL-subset query layer: parsing, evaluation, and result serialization.
//!
//! Query evaluation is read-only; any number of evaluations may run
//! concurrently against a frozen graph.

mod ast;
mod exec;
mod parser;
mod serialize;

pub use ast::{CompareOp, Element, Expr, Operand, OrderKey, SelectItem, Selection, SelectQuery};
pub use exec::{execute, ResultTable};
pub use parser::{parse_query, QueryParseError};
pub use serialize::{serialize_results, OutputFormat};
