//! In-memory fact store with hash indexes by subject, by predicate, and by
//! (predicate, object).
//!
//! The store is single-writer: mutations (assertion, ingest, rule inference)
//! happen in one logical thread; once inference reaches fixpoint the graph
//! can be shared read-only across concurrent query evaluations.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::Range;

use thiserror::Error;

use crate::schema::{PropertyRange, Schema};
use crate::term::{Iri, PrefixMap, Term, Value};
use crate::vocab;

/// Where a fact came from: asserted from input data, or inferred by a named
/// rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    Asserted,
    Inferred(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fact {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Value,
    pub origin: Origin,
}

impl Fact {
    pub fn display(&self, prefixes: &PrefixMap) -> String {
        format!(
            "{} {} {}",
            prefixes.display(&self.subject),
            prefixes.display(&self.predicate),
            self.object.display(prefixes)
        )
    }

    fn key(&self) -> (Iri, Iri, Value) {
        (
            self.subject.clone(),
            self.predicate.clone(),
            self.object.clone(),
        )
    }
}

/// Outcome of an assertion: duplicate (subject, predicate, object) triples
/// are a reported no-op regardless of origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    Added,
    Duplicate,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown class {0} in rdf:type assertion")]
    UnknownClass(String),
    #[error("datatype mismatch: property {property} expects {expected}, got {actual}")]
    DatatypeMismatch {
        property: String,
        expected: String,
        actual: String,
    },
    #[error("unknown entity {0}")]
    UnknownEntity(String),
}

/// A triple pattern: any position may be a constant or a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl TriplePattern {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    pub fn variables(&self) -> Vec<&str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(|t| match t {
                Term::Variable(v) => Some(v.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Number of constant positions; used as a selectivity estimate.
    pub fn constant_positions(&self) -> usize {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter(|t| !t.is_variable())
            .count()
    }
}

/// A solution mapping variable names to ground values.
pub type Binding = std::collections::BTreeMap<String, Value>;

/// Unify a pattern against a fact under an existing binding; returns the
/// extended binding on success.
pub fn unify(pattern: &TriplePattern, fact: &Fact, binding: &Binding) -> Option<Binding> {
    let mut out = binding.clone();
    let pairs = [
        (&pattern.subject, Value::Iri(fact.subject.clone())),
        (&pattern.predicate, Value::Iri(fact.predicate.clone())),
        (&pattern.object, fact.object.clone()),
    ];
    for (term, value) in pairs {
        match term {
            Term::Variable(name) => match out.get(name) {
                Some(bound) if *bound != value => return None,
                Some(_) => {}
                None => {
                    out.insert(name.clone(), value);
                }
            },
            other => {
                if other.to_value().as_ref() != Some(&value) {
                    return None;
                }
            }
        }
    }
    Some(out)
}

/// Directed reachability for [`Graph::entity_closure`].
///
/// The provenance predicates (`prov:wasGeneratedBy`, `prov:used`,
/// `ccpo:hasComponent`) all point from later artifacts to the earlier things
/// they came from, so `Backward` — into the past — follows stored triples
/// from subject to object, while `Forward` walks the inverted edges toward
/// downstream artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

/// Induced subgraph returned by [`Graph::entity_closure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub nodes: BTreeSet<Value>,
    pub edges: Vec<Fact>,
}

/// The fact store. Holds the schema, the registered prefixes, the facts, and
/// three hash indexes kept coherent with the fact list.
#[derive(Debug, Clone)]
pub struct Graph {
    schema: Schema,
    prefixes: PrefixMap,
    facts: Vec<Fact>,
    seen: HashSet<(Iri, Iri, Value)>,
    by_subject: HashMap<Iri, Vec<usize>>,
    by_predicate: HashMap<Iri, Vec<usize>>,
    by_predicate_object: HashMap<(Iri, Value), Vec<usize>>,
}

impl Graph {
    pub fn new(schema: Schema) -> Self {
        Graph {
            schema,
            prefixes: vocab::standard_prefixes(),
            facts: Vec::new(),
            seen: HashSet::new(),
            by_subject: HashMap::new(),
            by_predicate: HashMap::new(),
            by_predicate_object: HashMap::new(),
        }
    }

    /// A graph over the built-in CCPO schema subset.
    pub fn with_ccpo_schema() -> Self {
        Graph::new(crate::schema::ccpo_schema())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn register_prefix(&mut self, prefix: &str, namespace: &str) {
        self.prefixes.insert(prefix, namespace);
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn contains(&self, subject: &Iri, predicate: &Iri, object: &Value) -> bool {
        self.seen
            .contains(&(subject.clone(), predicate.clone(), object.clone()))
    }

    /// Assert a fact. `rdf:type` assertions are materialized up the subclass
    /// chain; re-asserting an existing triple is a no-op reported as
    /// [`Insertion::Duplicate`].
    pub fn assert(
        &mut self,
        subject: Iri,
        predicate: Iri,
        object: Value,
        origin: Origin,
    ) -> Result<Insertion, GraphError> {
        self.assert_tracked(subject, predicate, object, origin)
            .map(|(outcome, _)| outcome)
    }

    /// Like [`Graph::assert`], also returning the indexes of every fact the
    /// call actually added (the primary fact plus materialized supertypes).
    pub fn assert_tracked(
        &mut self,
        subject: Iri,
        predicate: Iri,
        object: Value,
        origin: Origin,
    ) -> Result<(Insertion, Vec<usize>), GraphError> {
        let mut added = Vec::new();
        let outcome = if predicate.as_str() == vocab::RDF_TYPE {
            let class = match &object {
                Value::Iri(class) => class.clone(),
                Value::Literal(_) => {
                    return Err(GraphError::DatatypeMismatch {
                        property: self.prefixes.display(&predicate),
                        expected: "a registered class IRI".into(),
                        actual: "literal".into(),
                    })
                }
            };
            if self.schema.class(&class).is_none() {
                return Err(GraphError::UnknownClass(self.prefixes.display(&class)));
            }
            let outcome = self.insert(subject.clone(), predicate.clone(), object, &origin, &mut added);
            for parent in self.schema.superclasses(&class) {
                self.insert(
                    subject.clone(),
                    predicate.clone(),
                    Value::Iri(parent),
                    &origin,
                    &mut added,
                );
            }
            outcome
        } else {
            let def = self
                .schema
                .property(&predicate)
                .ok_or_else(|| GraphError::UnknownPredicate(self.prefixes.display(&predicate)))?;
            match (&def.range, &object) {
                (PropertyRange::Datatype(dt), Value::Literal(lit)) if lit.datatype() == *dt => {}
                (PropertyRange::Datatype(dt), other) => {
                    return Err(GraphError::DatatypeMismatch {
                        property: self.prefixes.display(&predicate),
                        expected: dt.name().into(),
                        actual: describe_value(other, &self.prefixes),
                    })
                }
                (_, Value::Iri(_)) => {}
                (_, Value::Literal(lit)) => {
                    return Err(GraphError::DatatypeMismatch {
                        property: self.prefixes.display(&predicate),
                        expected: "an IRI (object property)".into(),
                        actual: describe_value(&Value::Literal(lit.clone()), &self.prefixes),
                    })
                }
            }
            self.insert(subject, predicate, object, &origin, &mut added)
        };
        Ok((outcome, added))
    }

    fn insert(
        &mut self,
        subject: Iri,
        predicate: Iri,
        object: Value,
        origin: &Origin,
        added: &mut Vec<usize>,
    ) -> Insertion {
        let key = (subject.clone(), predicate.clone(), object.clone());
        if !self.seen.insert(key) {
            return Insertion::Duplicate;
        }
        let id = self.facts.len();
        self.by_subject.entry(subject.clone()).or_default().push(id);
        self.by_predicate
            .entry(predicate.clone())
            .or_default()
            .push(id);
        self.by_predicate_object
            .entry((predicate.clone(), object.clone()))
            .or_default()
            .push(id);
        self.facts.push(Fact {
            subject,
            predicate,
            object,
            origin: origin.clone(),
        });
        added.push(id);
        Insertion::Added
    }

    /// Roll the graph back to its first `len` facts. Index vectors append in
    /// fact order, so each popped id is the tail of its index entries.
    pub fn truncate(&mut self, len: usize) {
        while self.facts.len() > len {
            let fact = self.facts.pop().expect("non-empty");
            let id = self.facts.len();
            self.seen.remove(&fact.key());
            pop_index(&mut self.by_subject, &fact.subject, id);
            pop_index(&mut self.by_predicate, &fact.predicate, id);
            pop_index(
                &mut self.by_predicate_object,
                &(fact.predicate.clone(), fact.object.clone()),
                id,
            );
        }
    }

    /// Fact ids matching the given constants within `range`, ascending, via
    /// the best available index (subject, predicate, or predicate-object).
    pub fn match_ids(
        &self,
        subject: Option<&Iri>,
        predicate: Option<&Iri>,
        object: Option<&Value>,
        range: Range<usize>,
    ) -> Vec<usize> {
        let candidates: Vec<usize> = match (subject, predicate, object) {
            (_, Some(p), Some(o)) => self
                .by_predicate_object
                .get(&(p.clone(), o.clone()))
                .cloned()
                .unwrap_or_default(),
            (Some(s), _, _) => self.by_subject.get(s).cloned().unwrap_or_default(),
            (None, Some(p), None) => self.by_predicate.get(p).cloned().unwrap_or_default(),
            (None, None, _) => (0..self.facts.len()).collect(),
        };
        candidates
            .into_iter()
            .filter(|&id| range.contains(&id))
            .filter(|&id| {
                let fact = &self.facts[id];
                subject.is_none_or(|s| fact.subject == *s)
                    && predicate.is_none_or(|p| fact.predicate == *p)
                    && object.is_none_or(|o| fact.object == *o)
            })
            .collect()
    }

    /// Facts matching a pattern under an existing binding, restricted to
    /// `range`, in ascending fact order.
    pub fn match_facts_in_range(
        &self,
        pattern: &TriplePattern,
        binding: &Binding,
        range: Range<usize>,
    ) -> Vec<usize> {
        let resolve = |term: &Term| -> ResolvedPosition {
            match term {
                Term::Variable(name) => match binding.get(name) {
                    Some(v) => ResolvedPosition::Value(v.clone()),
                    None => ResolvedPosition::Open,
                },
                other => ResolvedPosition::Value(other.to_value().expect("ground")),
            }
        };
        let s = resolve(&pattern.subject);
        let p = resolve(&pattern.predicate);
        let o = resolve(&pattern.object);
        // Subject/predicate positions resolved to a literal can match nothing.
        let s = match s {
            ResolvedPosition::Value(Value::Literal(_)) => return Vec::new(),
            ResolvedPosition::Value(Value::Iri(iri)) => Some(iri),
            ResolvedPosition::Open => None,
        };
        let p = match p {
            ResolvedPosition::Value(Value::Literal(_)) => return Vec::new(),
            ResolvedPosition::Value(Value::Iri(iri)) => Some(iri),
            ResolvedPosition::Open => None,
        };
        let o = match o {
            ResolvedPosition::Value(v) => Some(v),
            ResolvedPosition::Open => None,
        };
        let ids = self.match_ids(s.as_ref(), p.as_ref(), o.as_ref(), range);
        // Repeated variables within the pattern still need a unification pass.
        ids.into_iter()
            .filter(|&id| unify(pattern, &self.facts[id], binding).is_some())
            .collect()
    }

    /// Match a pattern against the whole graph. Returns one binding per
    /// matching fact, ordered lexicographically by the matched (subject,
    /// predicate, object).
    pub fn match_pattern(&self, pattern: &TriplePattern) -> Vec<Binding> {
        let empty = Binding::new();
        let mut ids = self.match_facts_in_range(pattern, &empty, 0..self.facts.len());
        ids.sort_by(|&a, &b| {
            let fa = &self.facts[a];
            let fb = &self.facts[b];
            fa.key().cmp(&fb.key())
        });
        ids.into_iter()
            .map(|id| unify(pattern, &self.facts[id], &empty).expect("matched above"))
            .collect()
    }

    /// All objects of `(subject, predicate, _)` facts, ascending.
    pub fn objects(&self, subject: &Iri, predicate: &Iri) -> Vec<Value> {
        let mut out: Vec<Value> = self
            .match_ids(Some(subject), Some(predicate), None, 0..self.facts.len())
            .into_iter()
            .map(|id| self.facts[id].object.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// All subjects typed as `class`, ascending.
    pub fn subjects_of_type(&self, class: &Iri) -> Vec<Iri> {
        let mut out: Vec<Iri> = self
            .match_ids(
                None,
                Some(&Iri::new(vocab::RDF_TYPE)),
                Some(&Value::Iri(class.clone())),
                0..self.facts.len(),
            )
            .into_iter()
            .map(|id| self.facts[id].subject.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn has_type(&self, entity: &Iri, class: &Iri) -> bool {
        self.contains(
            entity,
            &Iri::new(vocab::RDF_TYPE),
            &Value::Iri(class.clone()),
        )
    }

    /// The induced subgraph reachable from `root` via `relations`.
    ///
    /// Traversal visits each node once, so cycles terminate. `Backward`
    /// follows stored triples subject-to-object (upstream through the
    /// provenance chain), `Forward` follows them object-to-subject.
    pub fn entity_closure(
        &self,
        root: &Iri,
        relations: &BTreeSet<Iri>,
        direction: Direction,
    ) -> Result<Subgraph, GraphError> {
        let root_value = Value::Iri(root.clone());
        let known = self.by_subject.contains_key(root)
            || self.facts.iter().any(|f| f.object == root_value);
        if !known {
            return Err(GraphError::UnknownEntity(self.prefixes.display(root)));
        }

        let mut nodes = BTreeSet::new();
        let mut edge_ids = BTreeSet::new();
        let mut queue = std::collections::VecDeque::new();
        nodes.insert(root_value);
        queue.push_back(root.clone());

        while let Some(node) = queue.pop_front() {
            for relation in relations {
                if matches!(direction, Direction::Backward | Direction::Both) {
                    for id in
                        self.match_ids(Some(&node), Some(relation), None, 0..self.facts.len())
                    {
                        edge_ids.insert(id);
                        let object = self.facts[id].object.clone();
                        if nodes.insert(object.clone()) {
                            if let Value::Iri(next) = object {
                                queue.push_back(next);
                            }
                        }
                    }
                }
                if matches!(direction, Direction::Forward | Direction::Both) {
                    for id in self.match_ids(
                        None,
                        Some(relation),
                        Some(&Value::Iri(node.clone())),
                        0..self.facts.len(),
                    ) {
                        edge_ids.insert(id);
                        let subject = Value::Iri(self.facts[id].subject.clone());
                        if nodes.insert(subject.clone()) {
                            if let Value::Iri(next) = subject {
                                queue.push_back(next);
                            }
                        }
                    }
                }
            }
        }

        let mut edges: Vec<Fact> = edge_ids.into_iter().map(|id| self.facts[id].clone()).collect();
        edges.sort_by_key(Fact::key);
        Ok(Subgraph { nodes, edges })
    }
}

enum ResolvedPosition {
    Value(Value),
    Open,
}

fn describe_value(value: &Value, prefixes: &PrefixMap) -> String {
    match value {
        Value::Iri(iri) => format!("IRI {}", prefixes.display(iri)),
        Value::Literal(lit) => format!("{} literal {}", lit.datatype(), lit.lexical()),
    }
}

fn pop_index<K: std::hash::Hash + Eq>(index: &mut HashMap<K, Vec<usize>>, key: &K, id: usize) {
    if let Some(ids) = index.get_mut(key) {
        debug_assert_eq!(ids.last(), Some(&id));
        ids.pop();
        if ids.is_empty() {
            index.remove(key);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Literal;
    use crate::vocab::iri;

    fn product(name: &str) -> Iri {
        Iri::new(format!("{}{}", vocab::CCPO_NS, name))
    }

    fn graph_with_product(name: &str) -> Graph {
        let mut graph = Graph::with_ccpo_schema();
        graph
            .assert(
                product(name),
                iri(vocab::RDF_TYPE),
                Value::iri(vocab::PRODUCT),
                Origin::Asserted,
            )
            .unwrap();
        graph
    }

    #[test]
    fn first_insert_adds_then_duplicates() {
        let mut graph = Graph::with_ccpo_schema();
        let outcome = graph
            .assert(
                product("iwp1"),
                iri(vocab::RDF_TYPE),
                Value::iri(vocab::GROUPED_COMPONENT),
                Origin::Asserted,
            )
            .unwrap();
        assert_eq!(outcome, Insertion::Added);
        let outcome = graph
            .assert(
                product("iwp1"),
                iri(vocab::RDF_TYPE),
                Value::iri(vocab::GROUPED_COMPONENT),
                Origin::Asserted,
            )
            .unwrap();
        assert_eq!(outcome, Insertion::Duplicate);
    }

    #[test]
    fn type_assertions_materialize_superclasses() {
        let mut graph = Graph::with_ccpo_schema();
        graph
            .assert(
                product("steelFacingA"),
                iri(vocab::RDF_TYPE),
                Value::iri(vocab::COMPONENT),
                Origin::Asserted,
            )
            .unwrap();
        assert!(graph.has_type(&product("steelFacingA"), &iri(vocab::PRODUCT)));
    }

    #[test]
    fn object_property_rejects_string_literal() {
        let mut graph = graph_with_product("iwp1");
        let err = graph
            .assert(
                product("iwp1"),
                iri(vocab::HAS_COMPONENT),
                Value::Literal(Literal::String("steel".into())),
                Origin::Asserted,
            )
            .unwrap_err();
        assert!(matches!(err, GraphError::DatatypeMismatch { .. }));
    }

    #[test]
    fn data_property_rejects_wrong_datatype() {
        let mut graph = graph_with_product("iwp1");
        let err = graph
            .assert(
                product("iwp1"),
                iri(vocab::REFERENCE_SERVICE_LIFE),
                Value::Literal(Literal::String("25".into())),
                Origin::Asserted,
            )
            .unwrap_err();
        assert!(matches!(err, GraphError::DatatypeMismatch { .. }));
    }

    #[test]
    fn unknown_predicate_and_class_are_rejected() {
        let mut graph = Graph::with_ccpo_schema();
        let err = graph
            .assert(
                product("x"),
                product("notAProperty"),
                Value::iri(vocab::PRODUCT),
                Origin::Asserted,
            )
            .unwrap_err();
        assert!(matches!(err, GraphError::UnknownPredicate(_)));
        let err = graph
            .assert(
                product("x"),
                iri(vocab::RDF_TYPE),
                Value::Iri(product("NotAClass")),
                Origin::Asserted,
            )
            .unwrap_err();
        assert!(matches!(err, GraphError::UnknownClass(_)));
    }

    #[test]
    fn match_on_empty_graph_is_empty() {
        let graph = Graph::with_ccpo_schema();
        let pattern = TriplePattern::new(Term::var("x"), Term::var("p"), Term::var("o"));
        assert!(graph.match_pattern(&pattern).is_empty());
    }

    #[test]
    fn insert_then_match_round_trip() {
        let mut graph = graph_with_product("iwp1");
        graph
            .assert(
                product("iwp1"),
                iri(vocab::REFERENCE_SERVICE_LIFE),
                Value::Literal(Literal::Integer(25)),
                Origin::Asserted,
            )
            .unwrap();
        let pattern = TriplePattern::new(
            Term::Iri(product("iwp1")),
            Term::iri(vocab::REFERENCE_SERVICE_LIFE),
            Term::var("v"),
        );
        let bindings = graph.match_pattern(&pattern);
        assert_eq!(bindings.len(), 1);
        assert_eq!(
            bindings[0].get("v"),
            Some(&Value::Literal(Literal::Integer(25)))
        );
    }

    #[test]
    fn closure_with_empty_relations_is_just_the_root() {
        let graph = graph_with_product("iwp1");
        let sub = graph
            .entity_closure(&product("iwp1"), &BTreeSet::new(), Direction::Forward)
            .unwrap();
        assert_eq!(sub.nodes.len(), 1);
        assert!(sub.edges.is_empty());
    }

    #[test]
    fn closure_terminates_on_cycles() {
        let mut graph = Graph::with_ccpo_schema();
        for name in ["a", "b"] {
            graph
                .assert(
                    product(name),
                    iri(vocab::RDF_TYPE),
                    Value::iri(vocab::ACTIVITY),
                    Origin::Asserted,
                )
                .unwrap();
        }
        // A cycle of prov:used edges between two activities.
        graph
            .assert(
                product("a"),
                iri(vocab::USED),
                Value::Iri(product("b")),
                Origin::Asserted,
            )
            .unwrap();
        graph
            .assert(
                product("b"),
                iri(vocab::USED),
                Value::Iri(product("a")),
                Origin::Asserted,
            )
            .unwrap();
        let relations: BTreeSet<Iri> = [iri(vocab::USED)].into_iter().collect();
        let sub = graph
            .entity_closure(&product("a"), &relations, Direction::Both)
            .unwrap();
        assert_eq!(sub.nodes.len(), 2);
        assert_eq!(sub.edges.len(), 2);
    }

    #[test]
    fn closure_unknown_root_errors() {
        let graph = Graph::with_ccpo_schema();
        let err = graph
            .entity_closure(&product("ghost"), &BTreeSet::new(), Direction::Both)
            .unwrap_err();
        assert!(matches!(err, GraphError::UnknownEntity(_)));
    }

    #[test]
    fn truncate_restores_previous_state() {
        let mut graph = graph_with_product("iwp1");
        let checkpoint = graph.len();
        graph
            .assert(
                product("iwp1"),
                iri(vocab::AT_EOL),
                Value::Literal(Literal::Boolean(true)),
                Origin::Inferred("Rule1".into()),
            )
            .unwrap();
        assert_eq!(graph.len(), checkpoint + 1);
        graph.truncate(checkpoint);
        assert_eq!(graph.len(), checkpoint);
        assert!(!graph.contains(
            &product("iwp1"),
            &iri(vocab::AT_EOL),
            &Value::Literal(Literal::Boolean(true))
        ));
        // Re-assertion after rollback must work and report Added.
        let outcome = graph
            .assert(
                product("iwp1"),
                iri(vocab::AT_EOL),
                Value::Literal(Literal::Boolean(true)),
                Origin::Asserted,
            )
            .unwrap();
        assert_eq!(outcome, Insertion::Added);
    }
}
