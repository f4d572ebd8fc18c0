//! Graph-side decision making: run the ruleset, collect suggested routes,
//! and resolve the final recommendation by waste-hierarchy priority.

use serde::Serialize;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::eol::EolRoute;
use crate::graph::Graph;
use crate::rules::{forward_chain, EngineError, Limits, Rule, TraceStep};
use crate::term::{Iri, Literal, Value};
use crate::vocab;

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("unknown product {0}")]
    UnknownProduct(String),
    #[error("{0} is not typed ccpo:Product")]
    NotAProduct(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Per-product decision result with the fired rules and trace excerpt.
#[derive(Debug, Clone)]
pub struct DecisionReport {
    pub product: Iri,
    pub at_eol: bool,
    /// Every suggested route, intermediates included, in priority order.
    pub derived_routes: Vec<EolRoute>,
    /// Lowest-rank non-intermediate route; absent when not at EoL or when
    /// the ruleset derived no ranked route.
    pub final_route: Option<EolRoute>,
    pub fired_rules: Vec<String>,
    pub trace: Vec<TraceStep>,
    pub rounds: usize,
}

#[derive(Serialize)]
struct ReportJson {
    product: String,
    #[serde(rename = "atEoL")]
    at_eol: bool,
    #[serde(rename = "derivedRoutes")]
    derived_routes: Vec<&'static str>,
    #[serde(rename = "final")]
    final_route: Option<&'static str>,
    #[serde(rename = "firedRules")]
    fired_rules: Vec<String>,
    trace: Vec<TraceJson>,
}

#[derive(Serialize)]
struct TraceJson {
    rule: String,
    iteration: usize,
    bindings: BTreeMap<String, String>,
    fact: String,
}

impl DecisionReport {
    pub fn to_json(&self, graph: &Graph) -> String {
        let prefixes = graph.prefixes();
        let doc = ReportJson {
            product: prefixes.display(&self.product),
            at_eol: self.at_eol,
            derived_routes: self.derived_routes.iter().map(|r| r.name()).collect(),
            final_route: self.final_route.map(|r| r.name()),
            fired_rules: self.fired_rules.clone(),
            trace: self
                .trace
                .iter()
                .map(|step| TraceJson {
                    rule: step.rule.clone(),
                    iteration: step.iteration,
                    bindings: step
                        .binding
                        .iter()
                        .map(|(k, v)| (k.clone(), v.display(prefixes)))
                        .collect(),
                    fact: step.fact_display(prefixes),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    pub fn to_pretty(&self, graph: &Graph) -> String {
        let prefixes = graph.prefixes();
        let mut out = String::new();
        out.push_str(&format!("product: {}\n", prefixes.display(&self.product)));
        out.push_str(&format!("at end of life: {}\n", self.at_eol));
        if self.derived_routes.is_empty() {
            out.push_str("derived routes: (none)\n");
        } else {
            let routes: Vec<String> = self
                .derived_routes
                .iter()
                .map(|r| format!("{} (priority {})", r.name(), r.priority_rank()))
                .collect();
            out.push_str(&format!("derived routes: {}\n", routes.join(", ")));
        }
        match self.final_route {
            Some(route) => out.push_str(&format!("final route: {}\n", route.name())),
            None => out.push_str("final route: (none)\n"),
        }
        if self.fired_rules.is_empty() {
            out.push_str("fired rules: (none)\n");
        } else {
            out.push_str(&format!("fired rules: {}\n", self.fired_rules.join(", ")));
        }
        out
    }
}

/// Run `rules` to fixpoint and assemble the decision for `product`. The
/// inferred facts stay in the graph, so follow-up queries see them.
pub fn decide(
    graph: &mut Graph,
    product: &Iri,
    rules: &[Rule],
    limits: &Limits,
) -> Result<DecisionReport, DecideError> {
    let display = graph.prefixes().display(product);
    let product_value = Value::Iri(product.clone());
    let known = graph
        .facts()
        .iter()
        .any(|f| f.subject == *product || f.object == product_value);
    if !known {
        return Err(DecideError::UnknownProduct(display));
    }
    if !graph.has_type(product, &Iri::new(vocab::PRODUCT)) {
        return Err(DecideError::NotAProduct(display));
    }

    let (_, trace) = forward_chain(graph, rules, limits)?;

    let at_eol = graph.contains(
        product,
        &Iri::new(vocab::AT_EOL),
        &Value::Literal(Literal::Boolean(true)),
    );

    let mut derived_routes: Vec<EolRoute> = graph
        .objects(product, &Iri::new(vocab::SUGGESTED_EOL_ROUTE))
        .iter()
        .filter_map(|v| match v {
            Value::Iri(iri) => EolRoute::from_iri(iri),
            Value::Literal(_) => None,
        })
        .collect();
    derived_routes.sort_by_key(|r| (r.priority_rank(), *r));
    derived_routes.dedup();

    // The lowest rank wins; the fixed route order breaks rank ties.
    let final_route = if at_eol {
        derived_routes
            .iter()
            .find(|r| !r.is_intermediate())
            .copied()
    } else {
        None
    };

    let product_steps: Vec<TraceStep> = trace
        .steps
        .iter()
        .filter(|step| step.subject == *product)
        .cloned()
        .collect();
    let mut fired_rules = Vec::new();
    for step in &product_steps {
        if !fired_rules.contains(&step.rule) {
            fired_rules.push(step.rule.clone());
        }
    }

    Ok(DecisionReport {
        product: product.clone(),
        at_eol,
        derived_routes,
        final_route,
        fired_rules,
        trace: product_steps,
        rounds: trace.rounds,
    })
}

/// Human-readable derivation narrative for `explain`: each fired rule with
/// its bindings and the fact it produced, in derivation order.
pub fn explain_report(report: &DecisionReport, graph: &Graph) -> String {
    let prefixes = graph.prefixes();
    let name = prefixes.display(&report.product);
    let mut out = String::new();
    out.push_str(&format!("decision trace for {name}\n"));
    if report.trace.is_empty() {
        out.push_str("  no rules fired\n");
    }
    for step in &report.trace {
        let bindings: Vec<String> = step
            .binding
            .iter()
            .map(|(k, v)| format!("?{k}={}", v.display(prefixes)))
            .collect();
        let note = if step.fresh { "" } else { " (already present)" };
        out.push_str(&format!(
            "  round {}: {} [{}] => {}{}\n",
            step.iteration,
            step.rule,
            bindings.join(", "),
            step.fact_display(prefixes),
            note,
        ));
    }
    if report.at_eol {
        match report.final_route {
            Some(route) => out.push_str(&format!(
                "final route: {} (priority {})\n",
                route.name(),
                route.priority_rank()
            )),
            None => out.push_str(
                "at end of life, but no route derived: the ruleset has a gap for this state\n",
            ),
        }
    } else {
        let diff = service_life_diff(graph, &report.product);
        match diff {
            Some(diff) => out.push_str(&format!(
                "{name} is not at end-of-life (diff={diff}); no recommendation applies\n"
            )),
            None => out.push_str(&format!(
                "{name} is not at end-of-life; no recommendation applies\n"
            )),
        }
    }
    out
}

fn service_life_diff(graph: &Graph, product: &Iri) -> Option<i64> {
    let int_of = |predicate: &str| -> Option<i64> {
        graph
            .objects(product, &Iri::new(predicate))
            .into_iter()
            .find_map(|v| match v {
                Value::Literal(Literal::Integer(n)) => Some(n),
                _ => None,
            })
    };
    let rsl = int_of(vocab::REFERENCE_SERVICE_LIFE)?;
    let asl = int_of(vocab::ACTUAL_SERVICE_LIFE)?;
    Some(rsl - asl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eol::default_ruleset;
    use crate::turtle;

    const HEADER: &str = "@prefix ccpo: <http://www.semanticweb.org/ccpo#> .\n";

    fn graph(text: &str) -> Graph {
        let mut g = Graph::with_ccpo_schema();
        turtle::load_str(&mut g, &format!("{HEADER}{text}")).unwrap();
        g
    }

    fn product() -> Iri {
        Iri::new("http://www.semanticweb.org/ccpo#p")
    }

    fn run(text: &str) -> DecisionReport {
        let mut g = graph(text);
        decide(&mut g, &product(), &default_ruleset(true), &Limits::default()).unwrap()
    }

    #[test]
    fn green_healthy_product_gets_strong_reuse() {
        let report = run(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 24 ; ccpo:hasHealthState ccpo:green ; ccpo:hasMarketDemand ccpo:high ; ccpo:designForDisassembly true ; ccpo:hasEoLStrategy ccpo:doc1 .\nccpo:doc1 a ccpo:Document .\n",
        );
        assert!(report.at_eol);
        assert_eq!(report.final_route, Some(EolRoute::StrongReuseSuggestion));
        assert_eq!(report.derived_routes, vec![EolRoute::StrongReuseSuggestion]);
        assert!(report.fired_rules.contains(&"Rule1".to_string()));
        assert!(report.fired_rules.contains(&"Rule2.i".to_string()));
    }

    #[test]
    fn red_with_strategy_follows_the_manufacturer() {
        let report = run(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 25 ; ccpo:hasHealthState ccpo:red ; ccpo:hasEoLStrategy ccpo:doc1 .\nccpo:doc1 a ccpo:Document .\n",
        );
        assert_eq!(
            report.derived_routes,
            vec![
                EolRoute::FollowManufacturerEolStrategy,
                EolRoute::CannotReuseDueToPoorProductHealth
            ]
        );
        assert_eq!(
            report.final_route,
            Some(EolRoute::FollowManufacturerEolStrategy)
        );
    }

    #[test]
    fn red_low_demand_lands_in_landfill_via_rule4() {
        let report = run(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 25 ; ccpo:hasHealthState ccpo:red ; ccpo:hasMarketDemand ccpo:low .\n",
        );
        assert_eq!(report.final_route, Some(EolRoute::SendToLandfill));
        assert!(report.fired_rules.contains(&"Rule3.iv".to_string()));
        assert!(report.fired_rules.contains(&"Rule4".to_string()));
    }

    #[test]
    fn product_far_from_reference_life_has_no_final_route() {
        let report = run(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 20 ; ccpo:hasHealthState ccpo:green .\n",
        );
        assert!(!report.at_eol);
        assert_eq!(report.final_route, None);
        assert!(report.derived_routes.is_empty());
    }

    #[test]
    fn strategy_outranks_recycling_when_both_fire() {
        // Both Rule3.ii and Rule3.iii apply; the waste hierarchy prefers the
        // manufacturer strategy.
        let report = run(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 25 ; ccpo:hasHealthState ccpo:red ; ccpo:hasMarketDemand ccpo:high ; ccpo:hasEoLStrategy ccpo:doc1 .\nccpo:doc1 a ccpo:Document .\n",
        );
        assert!(report
            .derived_routes
            .contains(&EolRoute::FollowManufacturerEolStrategy));
        assert!(report
            .derived_routes
            .contains(&EolRoute::RecycleDueToHighMarketDemand));
        assert_eq!(
            report.final_route,
            Some(EolRoute::FollowManufacturerEolStrategy)
        );
    }

    #[test]
    fn unknown_and_untyped_products_error() {
        let mut g = graph("ccpo:m a ccpo:Material .\n");
        let err = decide(&mut g, &product(), &default_ruleset(true), &Limits::default())
            .unwrap_err();
        assert!(matches!(err, DecideError::UnknownProduct(_)));

        let mut g = graph("ccpo:p a ccpo:Material .\n");
        let err = decide(&mut g, &product(), &default_ruleset(true), &Limits::default())
            .unwrap_err();
        assert!(matches!(err, DecideError::NotAProduct(_)));
    }

    #[test]
    fn report_json_has_the_documented_shape() {
        let mut g = graph(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 24 ; ccpo:hasHealthState ccpo:green .\n",
        );
        let report =
            decide(&mut g, &product(), &default_ruleset(true), &Limits::default()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.to_json(&g)).unwrap();
        assert_eq!(json["product"], "ccpo:p");
        assert_eq!(json["atEoL"], true);
        assert_eq!(json["final"], "StrongReuseSuggestion");
        assert_eq!(json["derivedRoutes"][0], "StrongReuseSuggestion");
        assert!(json["trace"][0]["bindings"].is_object());
    }

    #[test]
    fn explain_covers_not_at_eol_and_empty_ruleset() {
        let text = "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 20 .\n";
        let mut g = graph(text);
        let report = decide(&mut g, &product(), &default_ruleset(true), &Limits::default()).unwrap();
        let narrative = explain_report(&report, &g);
        assert!(narrative.contains("not at end-of-life (diff=5"));

        let mut g = graph(text);
        let report = decide(&mut g, &product(), &[], &Limits::default()).unwrap();
        let narrative = explain_report(&report, &g);
        assert!(narrative.contains("no rules fired"));
    }
}
