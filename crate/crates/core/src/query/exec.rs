//! Query evaluation: left-deep nested-loop joins with pattern reordering by
//! estimated selectivity (constant positions first), left-join OPTIONAL
//! semantics, error-as-false FILTER semantics, COUNT aggregation, and
//! deterministic output ordering.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::graph::{Binding, Graph};
use crate::query::ast::*;
use crate::term::{value_order, Literal, Value};

/// Query results: a header and rows whose cells may be unbound (from
/// OPTIONAL patterns). Row width always equals header width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<Value>>>,
    /// Rows eliminated because a FILTER compared incompatible kinds
    /// (e.g. a string against a number). Diagnostics only, never a failure.
    pub filter_type_mismatches: usize,
}

#[derive(Default)]
struct Stats {
    type_mismatches: usize,
}

/// Evaluate a query against a graph. Inference must already have run if the
/// query targets inferred predicates.
pub fn execute(query: &SelectQuery, graph: &Graph) -> ResultTable {
    let mut stats = Stats::default();
    let solutions = eval_elements(&query.where_clause, graph, vec![Binding::new()], &mut stats);

    let header: Vec<String> = match &query.selection {
        Selection::Star => query.where_variables(),
        Selection::Items(items) => items.iter().map(|i| i.output_name().to_string()).collect(),
    };

    let mut rows: Vec<Vec<Option<Value>>> =
        if query.has_aggregates() || !query.group_by.is_empty() {
            aggregate_rows(query, solutions)
        } else {
            let vars: Vec<String> = match &query.selection {
                Selection::Star => header.clone(),
                Selection::Items(items) => items
                    .iter()
                    .map(|i| i.output_name().to_string())
                    .collect(),
            };
            solutions
                .iter()
                .map(|binding| vars.iter().map(|v| binding.get(v).cloned()).collect())
                .collect()
        };

    // Canonical order first so that ties under ORDER BY stay deterministic.
    rows.sort();
    if query.distinct {
        rows.dedup();
    }
    if !query.order_by.is_empty() {
        let keys: Vec<(usize, bool)> = query
            .order_by
            .iter()
            .filter_map(|k| {
                header
                    .iter()
                    .position(|h| *h == k.variable)
                    .map(|idx| (idx, k.descending))
            })
            .collect();
        rows.sort_by(|a, b| {
            for &(idx, descending) in &keys {
                let ordering = option_value_order(&a[idx], &b[idx]);
                let ordering = if descending { ordering.reverse() } else { ordering };
                if ordering != Ordering::Equal {
                    return ordering;
                }
            }
            Ordering::Equal
        });
    }
    let offset = query.offset.unwrap_or(0);
    let rows: Vec<_> = rows
        .into_iter()
        .skip(offset)
        .take(query.limit.unwrap_or(usize::MAX))
        .collect();

    ResultTable {
        header,
        rows,
        filter_type_mismatches: stats.type_mismatches,
    }
}

fn option_value_order(a: &Option<Value>, b: &Option<Value>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => value_order(x, y),
    }
}

fn aggregate_rows(query: &SelectQuery, solutions: Vec<Binding>) -> Vec<Vec<Option<Value>>> {
    let Selection::Items(items) = &query.selection else {
        return Vec::new();
    };
    let mut groups: BTreeMap<Vec<Option<Value>>, Vec<Binding>> = BTreeMap::new();
    for binding in solutions {
        let key: Vec<Option<Value>> = query
            .group_by
            .iter()
            .map(|v| binding.get(v).cloned())
            .collect();
        groups.entry(key).or_default().push(binding);
    }
    // Without GROUP BY, aggregates run over the whole solution bag, even
    // when it is empty.
    if query.group_by.is_empty() && groups.is_empty() {
        groups.insert(Vec::new(), Vec::new());
    }
    groups.into_values().map(|members| {
            items
                .iter()
                .map(|item| match item {
                    SelectItem::Variable(v) => {
                        members.first().and_then(|b| b.get(v).cloned())
                    }
                    SelectItem::Count { variable, .. } => {
                        let count = members
                            .iter()
                            .filter(|b| b.contains_key(variable))
                            .count();
                        Some(Value::Literal(Literal::Integer(count as i64)))
                    }
                })
                .collect()
        })
        .collect()
}

fn eval_elements(
    elements: &[Element],
    graph: &Graph,
    init: Vec<Binding>,
    stats: &mut Stats,
) -> Vec<Binding> {
    let mut solutions = init;
    let mut idx = 0;
    while idx < elements.len() {
        // Reorder each consecutive run of triple patterns by selectivity.
        let run_end = elements[idx..]
            .iter()
            .position(|e| !matches!(e, Element::Pattern(_)))
            .map(|n| idx + n)
            .unwrap_or(elements.len());
        if run_end > idx {
            let mut run: Vec<&Element> = elements[idx..run_end].iter().collect();
            run.sort_by_key(|e| match e {
                Element::Pattern(p) => 3 - p.constant_positions(),
                _ => 3,
            });
            for element in run {
                if let Element::Pattern(pattern) = element {
                    let mut next = Vec::new();
                    for binding in &solutions {
                        for id in graph.match_facts_in_range(pattern, binding, 0..graph.len()) {
                            let extended =
                                crate::graph::unify(pattern, &graph.facts()[id], binding)
                                    .expect("matched id unifies");
                            next.push(extended);
                        }
                    }
                    solutions = next;
                }
            }
            idx = run_end;
            continue;
        }
        match &elements[idx] {
            Element::Pattern(_) => unreachable!("handled by the run above"),
            Element::Optional(inner) => {
                let mut next = Vec::new();
                for binding in &solutions {
                    let extended =
                        eval_elements(inner, graph, vec![binding.clone()], stats);
                    if extended.is_empty() {
                        next.push(binding.clone());
                    } else {
                        next.extend(extended);
                    }
                }
                solutions = next;
            }
            Element::Filter(expr) => {
                solutions.retain(|binding| match eval_expr(expr, binding) {
                    Ok(keep) => keep,
                    Err(FilterFailure::TypeMismatch) => {
                        stats.type_mismatches += 1;
                        false
                    }
                    Err(FilterFailure::Unbound) => false,
                });
            }
            Element::SubSelect(inner) => {
                let table = execute(inner, graph);
                let mut next = Vec::new();
                for binding in &solutions {
                    for row in &table.rows {
                        if let Some(merged) = merge_row(binding, &table.header, row) {
                            next.push(merged);
                        }
                    }
                }
                solutions = next;
            }
        }
        idx += 1;
    }
    solutions
}

/// Natural join of an outer binding with a sub-select row: shared variables
/// must agree; unbound cells impose nothing.
fn merge_row(
    binding: &Binding,
    header: &[String],
    row: &[Option<Value>],
) -> Option<Binding> {
    let mut out = binding.clone();
    for (var, cell) in header.iter().zip(row) {
        if let Some(value) = cell {
            match out.get(var) {
                Some(existing) if existing != value => return None,
                Some(_) => {}
                None => {
                    out.insert(var.clone(), value.clone());
                }
            }
        }
    }
    Some(out)
}

enum FilterFailure {
    Unbound,
    TypeMismatch,
}

fn eval_expr(expr: &Expr, binding: &Binding) -> Result<bool, FilterFailure> {
    match expr {
        Expr::Bound(v) => Ok(binding.contains_key(v)),
        Expr::Not(inner) => Ok(!eval_expr(inner, binding)?),
        Expr::And(a, b) => Ok(eval_expr(a, binding)? && eval_expr(b, binding)?),
        Expr::Or(a, b) => Ok(eval_expr(a, binding)? || eval_expr(b, binding)?),
        Expr::Comparison { op, left, right } => {
            let left = resolve_operand(left, binding)?;
            let right = resolve_operand(right, binding)?;
            compare(*op, &left, &right)
        }
    }
}

fn resolve_operand(operand: &Operand, binding: &Binding) -> Result<Value, FilterFailure> {
    match operand {
        Operand::Constant(v) => Ok(v.clone()),
        Operand::Variable(v) => binding.get(v).cloned().ok_or(FilterFailure::Unbound),
    }
}

fn compare(op: CompareOp, left: &Value, right: &Value) -> Result<bool, FilterFailure> {
    let numeric = |v: &Value| -> Option<f64> {
        match v {
            Value::Literal(Literal::Integer(i)) => Some(*i as f64),
            Value::Literal(Literal::Decimal(d)) => Some(*d),
            _ => None,
        }
    };
    let ordering = match (left, right) {
        (Value::Iri(a), Value::Iri(b)) => {
            // IRIs support equality tests only.
            if matches!(op, CompareOp::Eq | CompareOp::Ne) {
                return Ok(if op == CompareOp::Eq { a == b } else { a != b });
            }
            return Err(FilterFailure::TypeMismatch);
        }
        (Value::Literal(Literal::String(a)), Value::Literal(Literal::String(b))) => a.cmp(b),
        (Value::Literal(Literal::Boolean(a)), Value::Literal(Literal::Boolean(b))) => a.cmp(b),
        (Value::Literal(Literal::Timestamp(a)), Value::Literal(Literal::Timestamp(b))) => {
            a.cmp(b)
        }
        (a, b) => match (numeric(a), numeric(b)) {
            (Some(x), Some(y)) => x.partial_cmp(&y).ok_or(FilterFailure::TypeMismatch)?,
            _ => return Err(FilterFailure::TypeMismatch),
        },
    };
    Ok(match op {
        CompareOp::Eq => ordering == Ordering::Equal,
        CompareOp::Ne => ordering != Ordering::Equal,
        CompareOp::Lt => ordering == Ordering::Less,
        CompareOp::Le => ordering != Ordering::Greater,
        CompareOp::Gt => ordering == Ordering::Greater,
        CompareOp::Ge => ordering != Ordering::Less,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;
    use crate::turtle;

    const PROLOGUE: &str = "PREFIX ccpo: <http://www.semanticweb.org/ccpo#>\n";
    const HEADER: &str = "@prefix ccpo: <http://www.semanticweb.org/ccpo#> .\n";

    fn graph(text: &str) -> Graph {
        let mut graph = Graph::with_ccpo_schema();
        turtle::load_str(&mut graph, &format!("{HEADER}{text}")).unwrap();
        graph
    }

    fn run(graph: &Graph, query: &str) -> ResultTable {
        execute(&parse_query(&format!("{PROLOGUE}{query}")).unwrap(), graph)
    }

    fn iwp() -> Graph {
        graph(
            "ccpo:iwp1 a ccpo:GroupedComponent ; ccpo:hasComponent ccpo:steelFacingA, ccpo:steelFacingB, ccpo:mineralWoolCore .\n\
             ccpo:steelFacingA a ccpo:Component ; ccpo:hasVirginMaterial ccpo:virginSteel ; ccpo:hasNonVirginMaterial ccpo:recycledSteel .\n\
             ccpo:steelFacingB a ccpo:Component ; ccpo:hasNonVirginMaterial ccpo:recycledSteel .\n\
             ccpo:mineralWoolCore a ccpo:Component ; ccpo:hasVirginMaterial ccpo:mineralWool .\n\
             ccpo:virginSteel a ccpo:Material .\nccpo:recycledSteel a ccpo:Material .\nccpo:mineralWool a ccpo:Material .\n",
        )
    }

    #[test]
    fn empty_graph_yields_header_and_zero_rows() {
        let graph = Graph::with_ccpo_schema();
        let table = run(&graph, "SELECT ?x WHERE { ?x a ccpo:Component }");
        assert_eq!(table.header, vec!["x"]);
        assert!(table.rows.is_empty());
    }

    #[test]
    fn single_pattern_matches_graph_store_output() {
        let graph = iwp();
        let table = run(&graph, "SELECT ?c WHERE { ccpo:iwp1 ccpo:hasComponent ?c }");
        let direct = graph.match_pattern(&crate::graph::TriplePattern::new(
            crate::term::Term::iri("http://www.semanticweb.org/ccpo#iwp1"),
            crate::term::Term::iri(crate::vocab::HAS_COMPONENT),
            crate::term::Term::var("c"),
        ));
        assert_eq!(table.rows.len(), direct.len());
        for (row, binding) in table.rows.iter().zip(direct.iter()) {
            assert_eq!(row[0].as_ref(), binding.get("c"));
        }
    }

    #[test]
    fn optional_keeps_unextended_rows() {
        let graph = iwp();
        let table = run(
            &graph,
            "SELECT ?c ?v WHERE { ccpo:iwp1 ccpo:hasComponent ?c . OPTIONAL { ?c ccpo:hasVirginMaterial ?v } }",
        );
        assert_eq!(table.rows.len(), 3);
        // steelFacingB has no virgin material: its cell is explicitly unbound.
        let unbound: Vec<_> = table.rows.iter().filter(|r| r[1].is_none()).collect();
        assert_eq!(unbound.len(), 1);
    }

    #[test]
    fn count_aggregates_bound_solutions() {
        let graph = iwp();
        let table = run(
            &graph,
            "SELECT (COUNT(?c) AS ?n) WHERE { ccpo:iwp1 ccpo:hasComponent ?c }",
        );
        assert_eq!(table.header, vec!["n"]);
        assert_eq!(
            table.rows,
            vec![vec![Some(Value::Literal(Literal::Integer(3)))]]
        );
    }

    #[test]
    fn group_by_counts_per_group_and_orders_by_alias() {
        let graph = graph(
            "ccpo:panelA a ccpo:GroupedComponent ; ccpo:hasComponent ccpo:c1, ccpo:c2, ccpo:c3 .\n\
             ccpo:panelB a ccpo:GroupedComponent ; ccpo:hasComponent ccpo:c4, ccpo:c5 .\n\
             ccpo:c1 a ccpo:Component .\nccpo:c2 a ccpo:Component .\nccpo:c3 a ccpo:Component .\n\
             ccpo:c4 a ccpo:Component .\nccpo:c5 a ccpo:Component .\n",
        );
        let table = run(
            &graph,
            "SELECT ?p (COUNT(?c) AS ?n) WHERE { ?p ccpo:hasComponent ?c } GROUP BY ?p ORDER BY DESC(?n)",
        );
        assert_eq!(table.header, vec!["p", "n"]);
        assert_eq!(table.rows.len(), 2);
        assert_eq!(
            table.rows[0][1],
            Some(Value::Literal(Literal::Integer(3)))
        );
        assert_eq!(
            table.rows[1][1],
            Some(Value::Literal(Literal::Integer(2)))
        );
    }

    #[test]
    fn count_over_empty_solutions_is_zero() {
        let graph = Graph::with_ccpo_schema();
        let table = run(
            &graph,
            "SELECT (COUNT(?c) AS ?n) WHERE { ccpo:iwp1 ccpo:hasComponent ?c }",
        );
        assert_eq!(
            table.rows,
            vec![vec![Some(Value::Literal(Literal::Integer(0)))]]
        );
    }

    #[test]
    fn filter_eliminates_rows_and_counts_type_mismatches() {
        let graph = graph(
            "@prefix dicbm: <https://w3id.org/digitalconstruction/BuildingMaterials#> .\nccpo:gwp a dicbm:Property ; ccpo:propertyValue 1.92 .\nccpo:other a dicbm:Property ; ccpo:propertyValue 0.5 .\n",
        );
        let table = run(
            &graph,
            "SELECT ?p WHERE { ?p ccpo:propertyValue ?v . FILTER(?v > 1) }",
        );
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.filter_type_mismatches, 0);

        let table = run(
            &graph,
            "SELECT ?p WHERE { ?p ccpo:propertyValue ?v . FILTER(?v > \"one\") }",
        );
        assert!(table.rows.is_empty());
        assert_eq!(table.filter_type_mismatches, 2);
    }

    #[test]
    fn bound_distinguishes_optional_rows() {
        let graph = iwp();
        let table = run(
            &graph,
            "SELECT ?c WHERE { ccpo:iwp1 ccpo:hasComponent ?c . OPTIONAL { ?c ccpo:hasVirginMaterial ?v } FILTER(!bound(?v)) }",
        );
        assert_eq!(table.rows.len(), 1);
        let cell = table.rows[0][0].as_ref().unwrap();
        assert!(cell.display(graph.prefixes()).contains("steelFacingB"));
    }

    #[test]
    fn distinct_is_idempotent() {
        let graph = graph(
            "ccpo:a a ccpo:Component ; ccpo:hasVirginMaterial ccpo:m .\nccpo:b a ccpo:Component ; ccpo:hasVirginMaterial ccpo:m .\nccpo:m a ccpo:Material .\n",
        );
        let once = run(&graph, "SELECT DISTINCT ?m WHERE { ?c ccpo:hasVirginMaterial ?m }");
        assert_eq!(once.rows.len(), 1);
        // Feeding DISTINCT output through the same projection changes nothing.
        let twice = once.rows.clone();
        let mut deduped = twice.clone();
        deduped.dedup();
        assert_eq!(twice, deduped);
    }

    #[test]
    fn order_by_desc_with_limit_and_offset() {
        let graph = iwp();
        let table = run(
            &graph,
            "SELECT ?c WHERE { ccpo:iwp1 ccpo:hasComponent ?c } ORDER BY DESC(?c) LIMIT 1 OFFSET 1",
        );
        assert_eq!(table.rows.len(), 1);
        assert!(table.rows[0][0]
            .as_ref()
            .unwrap()
            .display(graph.prefixes())
            .contains("steelFacingA"));
    }

    #[test]
    fn subselect_joins_on_shared_variables() {
        let graph = iwp();
        let table = run(
            &graph,
            "SELECT ?c ?v WHERE { { SELECT ?c WHERE { ccpo:iwp1 ccpo:hasComponent ?c } } ?c ccpo:hasVirginMaterial ?v }",
        );
        assert_eq!(table.rows.len(), 2);
    }

    #[test]
    fn adding_a_filter_never_adds_rows() {
        let graph = iwp();
        let base = run(&graph, "SELECT ?c WHERE { ccpo:iwp1 ccpo:hasComponent ?c }");
        let filtered = run(
            &graph,
            "SELECT ?c WHERE { ccpo:iwp1 ccpo:hasComponent ?c . FILTER(?c != ccpo:steelFacingA) }",
        );
        assert!(filtered.rows.len() < base.rows.len());
        for row in &filtered.rows {
            assert!(base.rows.contains(row));
        }
    }
}
