//! Closed-world schema validation.
//!
//! Six constraint families:
//! 1. disjoint-class membership,
//! 2. grouped components need at least two distinct components,
//! 3. property domain/range conformance,
//! 4. temporal ordering of finite-time processes,
//! 5. products should record a generating activity (existential, advisory),
//! 6. products and materials should link an information artifact
//!    (existential, advisory).
//!
//! The existential axioms cannot be falsified under the open-world
//! assumption, so they surface as warnings by default; strict mode upgrades
//! them to errors for fixture QA.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::Graph;
use crate::schema::PropertyRange;
use crate::term::{Iri, Literal, Value};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Advisory,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub code: String,
    pub entity: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
    /// Number of constraint instances evaluated, satisfied or not.
    pub checked: usize,
}

impl ValidationReport {
    /// A graph with zero errors is consistent under the closed-world checks.
    pub fn is_consistent(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const DISJOINT_CLASSES: &str = "disjoint-classes";
pub const COMPONENT_CARDINALITY: &str = "component-cardinality";
pub const DOMAIN_VIOLATION: &str = "domain-violation";
pub const RANGE_VIOLATION: &str = "range-violation";
pub const TEMPORAL_ORDER: &str = "temporal-order";
pub const MISSING_GENERATION: &str = "missing-generation-activity";
pub const MISSING_ARTIFACT: &str = "missing-information-artifact";

/// Validate a graph against the schema constraints. Pure: repeated calls on
/// the same graph produce identical reports.
pub fn validate(graph: &Graph, mode: Mode) -> ValidationReport {
    let prefixes = graph.prefixes();
    let rdf_type = Iri::new(vocab::RDF_TYPE);
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut checked = 0usize;

    // Entity -> asserted classes (materialized supertypes included).
    let mut types: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for fact in graph.facts() {
        if fact.predicate == rdf_type {
            if let Value::Iri(class) = &fact.object {
                types
                    .entry(fact.subject.clone())
                    .or_default()
                    .insert(class.clone());
            }
        }
    }

    // (1) Disjointness.
    for (entity, classes) in &types {
        checked += 1;
        let classes: Vec<&Iri> = classes.iter().collect();
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                if graph.schema().are_disjoint(a, b) {
                    errors.push(Issue {
                        code: DISJOINT_CLASSES.into(),
                        entity: prefixes.display(entity),
                        message: format!(
                            "typed under disjoint classes {} and {}",
                            prefixes.display(a),
                            prefixes.display(b)
                        ),
                    });
                }
            }
        }
    }

    // (2) GroupedComponent cardinality: at least 2 distinct components of
    // type Component.
    let grouped = Iri::new(vocab::GROUPED_COMPONENT);
    let component = Iri::new(vocab::COMPONENT);
    let has_component = Iri::new(vocab::HAS_COMPONENT);
    for (entity, classes) in &types {
        if !classes.contains(&grouped) {
            continue;
        }
        checked += 1;
        let count = graph
            .objects(entity, &has_component)
            .iter()
            .filter(|o| matches!(o, Value::Iri(iri) if graph.has_type(iri, &component)))
            .count();
        if count < 2 {
            errors.push(Issue {
                code: COMPONENT_CARDINALITY.into(),
                entity: prefixes.display(entity),
                message: format!(
                    "grouped component has {count} component(s) of type {}; at least 2 required",
                    prefixes.display(&component)
                ),
            });
        }
    }

    // (3) Domain/range conformance for every non-type fact.
    for fact in graph.facts() {
        if fact.predicate == rdf_type {
            continue;
        }
        let def = graph
            .schema()
            .property(&fact.predicate)
            .expect("assertion guarantees registered predicates");
        if let Some(domain) = &def.domain {
            checked += 1;
            let ok = types
                .get(&fact.subject)
                .is_some_and(|classes| classes.contains(domain));
            if !ok {
                errors.push(Issue {
                    code: DOMAIN_VIOLATION.into(),
                    entity: prefixes.display(&fact.subject),
                    message: format!(
                        "subject of {} is not typed {}",
                        prefixes.display(&fact.predicate),
                        prefixes.display(domain)
                    ),
                });
            }
        }
        if let PropertyRange::Class(range) = &def.range {
            checked += 1;
            let ok = match &fact.object {
                Value::Iri(object) => types
                    .get(object)
                    .is_some_and(|classes| classes.contains(range)),
                Value::Literal(_) => false,
            };
            if !ok {
                errors.push(Issue {
                    code: RANGE_VIOLATION.into(),
                    entity: prefixes.display(&fact.subject),
                    message: format!(
                        "object of {} is not typed {}",
                        prefixes.display(&fact.predicate),
                        prefixes.display(range)
                    ),
                });
            }
        }
    }

    // (4) Finite-time processes must not end before they start.
    let activity = Iri::new(vocab::ACTIVITY);
    let ownership = Iri::new(vocab::OWNERSHIP_RECORD);
    let started = Iri::new(vocab::STARTED_AT_TIME);
    let ended = Iri::new(vocab::ENDED_AT_TIME);
    for (entity, classes) in &types {
        if !classes.contains(&activity) && !classes.contains(&ownership) {
            continue;
        }
        checked += 1;
        let starts = timestamps(graph, entity, &started);
        let ends = timestamps(graph, entity, &ended);
        let violated = starts
            .iter()
            .any(|s| ends.iter().any(|e| e < s));
        if violated {
            errors.push(Issue {
                code: TEMPORAL_ORDER.into(),
                entity: prefixes.display(entity),
                message: "endedAtTime is earlier than startedAtTime".into(),
            });
        }
    }

    // (5) and (6): existential axioms, closed-world warnings.
    let product = Iri::new(vocab::PRODUCT);
    let material = Iri::new(vocab::MATERIAL);
    let was_generated_by = Iri::new(vocab::WAS_GENERATED_BY);
    let has_artifact = Iri::new(vocab::HAS_INFORMATION_ARTIFACT);
    for (entity, classes) in &types {
        let is_product = classes.contains(&product);
        let is_material = classes.contains(&material);
        if is_product {
            checked += 1;
            if graph.objects(entity, &was_generated_by).is_empty() {
                let issue = Issue {
                    code: MISSING_GENERATION.into(),
                    entity: prefixes.display(entity),
                    message: "product has no prov:wasGeneratedBy activity".into(),
                };
                match mode {
                    Mode::Strict => errors.push(issue),
                    Mode::Advisory => warnings.push(issue),
                }
            }
        }
        if is_product || is_material {
            checked += 1;
            if graph.objects(entity, &has_artifact).is_empty() {
                let issue = Issue {
                    code: MISSING_ARTIFACT.into(),
                    entity: prefixes.display(entity),
                    message: "no information-bearing artifact linked".into(),
                };
                match mode {
                    Mode::Strict => errors.push(issue),
                    Mode::Advisory => warnings.push(issue),
                }
            }
        }
    }

    ValidationReport {
        errors,
        warnings,
        checked,
    }
}

fn timestamps(graph: &Graph, entity: &Iri, predicate: &Iri) -> Vec<chrono::NaiveDateTime> {
    graph
        .objects(entity, predicate)
        .into_iter()
        .filter_map(|v| match v {
            Value::Literal(Literal::Timestamp(t)) => Some(t),
            _ => None,
        })
        .collect()
}
