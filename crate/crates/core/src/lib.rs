//! eolcycle: a provenance knowledge-graph engine for construction products
//! with rule-based end-of-life decision support.
//!
//! The crate aggregates product lifecycle data into a typed in-memory fact
//! store, checks it against closed-world schema constraints, runs
//! forward-chaining inference over an SWRL-style ruleset, evaluates a
//! SPARQL-subset query language, and recommends end-of-life routes (reuse,
//! manufacturer strategy, recycling, landfill) with full derivation traces.
//!
//! Modules:
//! - [`term`], [`schema`], [`graph`]: the fact store.
//! - [`turtle`]: turtle-subset ingest and export.
//! - [`validate`]: closed-world consistency checks.
//! - [`rules`]: rule parsing, builtins, and semi-naive forward chaining.
//! - [`query`]: query parsing, evaluation, and result serialization.
//! - [`eol`]: the health model, the default ruleset, priority resolution,
//!   and the independent decision oracle.
//! - [`cli`]: the `eolcycle` command-line workflow.

pub mod cli;
pub mod eol;
pub mod graph;
pub mod query;
pub mod rules;
pub mod schema;
pub mod term;
pub mod turtle;
pub mod validate;
pub mod vocab;

pub use graph::{Binding, Direction, Fact, Graph, GraphError, Insertion, Origin, TriplePattern};
pub use schema::{ccpo_schema, PropertyDef, PropertyKind, PropertyRange, Schema, SchemaClass};
pub use term::{Datatype, Iri, Literal, PrefixMap, Term, Value};
