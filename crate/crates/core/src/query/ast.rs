//! Query AST for the SPARQL subset.

use crate::graph::TriplePattern;
use crate::term::Value;

/// A parsed SELECT query.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectQuery {
    pub distinct: bool,
    pub selection: Selection,
    pub where_clause: Vec<Element>,
    pub group_by: Vec<String>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Star,
    Items(Vec<SelectItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectItem {
    Variable(String),
    /// `(COUNT(?var) AS ?alias)` — counts rows where `var` is bound.
    Count { variable: String, alias: String },
}

impl SelectItem {
    pub fn output_name(&self) -> &str {
        match self {
            SelectItem::Variable(v) => v,
            SelectItem::Count { alias, .. } => alias,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderKey {
    pub variable: String,
    pub descending: bool,
}

/// One element of a where-clause, evaluated in sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Pattern(TriplePattern),
    Optional(Vec<Element>),
    Filter(Expr),
    SubSelect(Box<SelectQuery>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Comparison {
        op: CompareOp,
        left: Operand,
        right: Operand,
    },
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Bound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Variable(String),
    Constant(Value),
}

impl SelectQuery {
    /// Variables visible to projection: pattern variables anywhere in the
    /// clause, plus the projected variables of sub-selects.
    pub fn where_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_variables(&self.where_clause, &mut out);
        out
    }

    pub fn has_aggregates(&self) -> bool {
        match &self.selection {
            Selection::Star => false,
            Selection::Items(items) => items
                .iter()
                .any(|item| matches!(item, SelectItem::Count { .. })),
        }
    }
}

fn collect_variables(elements: &[Element], out: &mut Vec<String>) {
    for element in elements {
        match element {
            Element::Pattern(pattern) => {
                for v in pattern.variables() {
                    if !out.iter().any(|existing| existing == v) {
                        out.push(v.to_string());
                    }
                }
            }
            Element::Optional(inner) => collect_variables(inner, out),
            Element::Filter(_) => {}
            Element::SubSelect(query) => {
                let header = match &query.selection {
                    Selection::Star => query.where_variables(),
                    Selection::Items(items) => items
                        .iter()
                        .map(|i| i.output_name().to_string())
                        .collect(),
                };
                for v in header {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
    }
}
