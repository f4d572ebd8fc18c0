//! Python bindings: a `KnowledgeGraph` class wrapping the fact store plus
//! the health-model and oracle functions. String-based at the boundary:
//! terms go in as prefixed names or literals, reports come back as JSON.

use std::collections::{BTreeSet, HashMap};

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use eolcycle::eol::{
    self, classify_health as classify, decide, explain_report, health_value as health,
    oracle_decision as oracle, HealthModelParams, HealthRating, MarketDemand, ProductState,
    Thresholds,
};
use eolcycle::graph::{Direction, Graph, TriplePattern};
use eolcycle::query::{execute, parse_query, serialize_results, OutputFormat};
use eolcycle::rules::{forward_chain, parse_rules, Limits};
use eolcycle::term::{Iri, Literal, Term};
use eolcycle::validate::{validate, Mode};
use eolcycle::{turtle, vocab};

fn value_err(message: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(message.to_string())
}

/// An in-memory provenance graph over the built-in schema subset.
#[pyclass]
struct KnowledgeGraph {
    graph: Graph,
}

impl KnowledgeGraph {
    fn parse_iri(&self, text: &str) -> PyResult<Iri> {
        if let Some(stripped) = text.strip_prefix('<') {
            return Ok(Iri::new(stripped.trim_end_matches('>')));
        }
        if let Some((prefix, local)) = text.split_once(':') {
            if let Some(iri) = self.graph.prefixes().expand(prefix, local) {
                return Ok(iri);
            }
            if text.contains("://") {
                return Ok(Iri::new(text));
            }
            return Err(value_err(format!("unknown prefix '{prefix}' in '{text}'")));
        }
        Err(value_err(format!(
            "'{text}' is neither a prefixed name nor an IRI"
        )))
    }

    /// `None` or `?name` make a variable; everything else is a constant:
    /// a prefixed name, `<iri>`, a quoted string, a number, or a boolean.
    fn parse_position(&self, text: Option<&str>, default_var: &str) -> PyResult<Term> {
        let Some(text) = text else {
            return Ok(Term::var(default_var));
        };
        if let Some(name) = text.strip_prefix('?') {
            return Ok(Term::var(name));
        }
        if let Some(stripped) = text.strip_prefix('"') {
            return Ok(Term::Literal(Literal::String(
                stripped.trim_end_matches('"').to_string(),
            )));
        }
        match text {
            "true" => return Ok(Term::Literal(Literal::Boolean(true))),
            "false" => return Ok(Term::Literal(Literal::Boolean(false))),
            _ => {}
        }
        if let Ok(n) = text.parse::<i64>() {
            return Ok(Term::Literal(Literal::Integer(n)));
        }
        if let Ok(v) = text.parse::<f64>() {
            return Ok(Term::Literal(Literal::decimal(v)));
        }
        Ok(Term::Iri(self.parse_iri(text)?))
    }
}

#[pymethods]
impl KnowledgeGraph {
    #[new]
    fn new() -> Self {
        KnowledgeGraph {
            graph: Graph::with_ccpo_schema(),
        }
    }

    /// Parse turtle text and assert its triples. Returns facts added.
    fn load_turtle(&mut self, text: &str) -> PyResult<usize> {
        turtle::load_str(&mut self.graph, text).map_err(value_err)
    }

    /// Load a `.ttl` file. Returns facts added.
    fn load_file(&mut self, path: &str) -> PyResult<usize> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        turtle::load_str(&mut self.graph, &text).map_err(value_err)
    }

    fn fact_count(&self) -> usize {
        self.graph.len()
    }

    /// Closed-world validation report as JSON.
    #[pyo3(signature = (strict = false))]
    fn validate(&self, strict: bool) -> String {
        let mode = if strict { Mode::Strict } else { Mode::Advisory };
        validate(&self.graph, mode).to_json()
    }

    #[pyo3(signature = (strict = false))]
    fn is_consistent(&self, strict: bool) -> bool {
        let mode = if strict { Mode::Strict } else { Mode::Advisory };
        validate(&self.graph, mode).is_consistent()
    }

    /// Run forward chaining. `ruleset` is rule text (defaults to the bundled
    /// ruleset; `reconciliation` controls its reconciliation rules).
    /// Returns the number of inferred facts.
    #[pyo3(signature = (ruleset = None, reconciliation = true))]
    fn infer(&mut self, ruleset: Option<&str>, reconciliation: bool) -> PyResult<usize> {
        let rules = match ruleset {
            Some(text) => parse_rules(text).map_err(value_err)?,
            None => eol::default_ruleset(reconciliation),
        };
        let (inferred, _) =
            forward_chain(&mut self.graph, &rules, &Limits::default()).map_err(value_err)?;
        Ok(inferred.len())
    }

    /// Evaluate a query; `format` is `tsv`, `json`, or `pretty`.
    #[pyo3(signature = (text, format = "tsv"))]
    fn query(&self, text: &str, format: &str) -> PyResult<String> {
        let format: OutputFormat = format.parse().map_err(value_err)?;
        let ast = parse_query(text).map_err(value_err)?;
        let table = execute(&ast, &self.graph);
        Ok(serialize_results(&table, format, self.graph.prefixes()))
    }

    /// Match one triple pattern; positions are `None` (wildcard), `?var`,
    /// or constants. Returns one dict per match.
    #[pyo3(signature = (subject = None, predicate = None, object = None))]
    fn match_pattern(
        &self,
        subject: Option<&str>,
        predicate: Option<&str>,
        object: Option<&str>,
    ) -> PyResult<Vec<HashMap<String, String>>> {
        let pattern = TriplePattern::new(
            self.parse_position(subject, "s")?,
            self.parse_position(predicate, "p")?,
            self.parse_position(object, "o")?,
        );
        let prefixes = self.graph.prefixes();
        Ok(self
            .graph
            .match_pattern(&pattern)
            .into_iter()
            .map(|binding| {
                binding
                    .iter()
                    .map(|(k, v)| (k.clone(), v.display(prefixes)))
                    .collect()
            })
            .collect())
    }

    /// Induced subgraph reachable from `root` along `relations`;
    /// `direction` is `forward`, `backward`, or `both`. Returns
    /// (nodes, edges) in display form.
    #[pyo3(signature = (root, relations, direction = "backward"))]
    fn entity_closure(
        &self,
        root: &str,
        relations: Vec<String>,
        direction: &str,
    ) -> PyResult<(Vec<String>, Vec<String>)> {
        let root = self.parse_iri(root)?;
        let relations: BTreeSet<Iri> = relations
            .iter()
            .map(|r| self.parse_iri(r))
            .collect::<PyResult<_>>()?;
        let direction = match direction {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            "both" => Direction::Both,
            other => return Err(value_err(format!("unknown direction '{other}'"))),
        };
        let subgraph = self
            .graph
            .entity_closure(&root, &relations, direction)
            .map_err(value_err)?;
        let prefixes = self.graph.prefixes();
        Ok((
            subgraph.nodes.iter().map(|n| n.display(prefixes)).collect(),
            subgraph
                .edges
                .iter()
                .map(|f| f.display(prefixes))
                .collect(),
        ))
    }

    /// Run the decision workflow for a product. Returns the report as JSON.
    #[pyo3(signature = (product, ruleset = None, reconciliation = true))]
    fn decide(
        &mut self,
        product: &str,
        ruleset: Option<&str>,
        reconciliation: bool,
    ) -> PyResult<String> {
        let rules = match ruleset {
            Some(text) => parse_rules(text).map_err(value_err)?,
            None => eol::default_ruleset(reconciliation),
        };
        let product = self.parse_iri(product)?;
        let report =
            decide(&mut self.graph, &product, &rules, &Limits::default()).map_err(value_err)?;
        Ok(report.to_json(&self.graph))
    }

    /// Human-readable derivation narrative for a product's decision.
    fn explain(&mut self, product: &str) -> PyResult<String> {
        let product = self.parse_iri(product)?;
        let report = decide(
            &mut self.graph,
            &product,
            &eol::default_ruleset(true),
            &Limits::default(),
        )
        .map_err(value_err)?;
        Ok(explain_report(&report, &self.graph))
    }

    /// Serialize the graph back to turtle.
    fn export_turtle(&self) -> String {
        turtle::export(&self.graph)
    }

    fn __len__(&self) -> usize {
        self.graph.len()
    }

    fn __repr__(&self) -> String {
        format!("KnowledgeGraph({} facts)", self.graph.len())
    }
}

/// Health decay: initial health times exp(-rate * duration).
#[pyfunction]
fn health_value(initial_health: f64, decline_rate: f64, operating_duration: f64) -> PyResult<f64> {
    let params = HealthModelParams::new(initial_health, decline_rate, operating_duration)
        .map_err(value_err)?;
    Ok(health(&params))
}

/// Map a health value to "green", "amber", or "red".
#[pyfunction]
#[pyo3(signature = (value, green_min = 0.7, amber_min = 0.4))]
fn classify_health(value: f64, green_min: f64, amber_min: f64) -> PyResult<String> {
    let thresholds = Thresholds::new(green_min, amber_min).map_err(value_err)?;
    Ok(classify(value, &thresholds).name().to_string())
}

/// Rule-engine-free decision oracle over a complete product state.
/// Returns (at_eol, route_name_or_None).
#[pyfunction]
fn oracle_decision(
    health: &str,
    reference_service_life: i64,
    actual_service_life: i64,
    strategy_exists: bool,
    market_demand: &str,
    design_for_disassembly: bool,
) -> PyResult<(bool, Option<String>)> {
    let health = HealthRating::parse(health)
        .ok_or_else(|| value_err(format!("unknown health state '{health}'")))?;
    let market_demand = MarketDemand::parse(market_demand)
        .ok_or_else(|| value_err(format!("unknown market demand '{market_demand}'")))?;
    let state = ProductState {
        health,
        reference_service_life,
        actual_service_life,
        strategy_exists,
        market_demand,
        design_for_disassembly,
    };
    let (at_eol, route) = oracle(&state);
    Ok((at_eol, route.map(|r| r.name().to_string())))
}

/// The bundled default ruleset text.
#[pyfunction]
fn default_ruleset_text() -> &'static str {
    eol::DEFAULT_RULESET_TEXT
}

#[pymodule]
fn eolcycle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<KnowledgeGraph>()?;
    m.add_function(wrap_pyfunction!(health_value, m)?)?;
    m.add_function(wrap_pyfunction!(classify_health, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_decision, m)?)?;
    m.add_function(wrap_pyfunction!(default_ruleset_text, m)?)?;
    m.add("CCPO_NS", vocab::CCPO_NS)?;
    m.add("PROV_NS", vocab::PROV_NS)?;
    Ok(())
}
