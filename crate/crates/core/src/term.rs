//! Terms: IRIs, typed literals, and variables.
//!
//! A [`Term`] is the atom of every fact, rule, and query in the engine.
//! Ground terms (IRIs and literals) are separated into [`Value`] so that
//! stored facts can never contain a variable by construction.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};

/// An expanded (absolute) IRI.
///
/// Prefixed names are resolved to their full form at parse time; the
/// prefixed rendering is recovered for display via [`PrefixMap::compact`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(iri: impl Into<String>) -> Self {
        Iri(iri.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Iri {
    fn from(s: &str) -> Self {
        Iri::new(s)
    }
}

/// Datatype tags supported for literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Datatype {
    String,
    Decimal,
    Integer,
    Boolean,
    Timestamp,
}

impl Datatype {
    /// The XSD IRI used when serializing typed literals.
    pub fn xsd_iri(&self) -> &'static str {
        match self {
            Datatype::String => "http://www.w3.org/2001/XMLSchema#string",
            Datatype::Decimal => "http://www.w3.org/2001/XMLSchema#decimal",
            Datatype::Integer => "http://www.w3.org/2001/XMLSchema#integer",
            Datatype::Boolean => "http://www.w3.org/2001/XMLSchema#boolean",
            Datatype::Timestamp => "http://www.w3.org/2001/XMLSchema#dateTime",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Decimal => "decimal",
            Datatype::Integer => "integer",
            Datatype::Boolean => "boolean",
            Datatype::Timestamp => "timestamp",
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A typed literal.
///
/// Literals compare by `(datatype, canonical value)`: the integer `1` and the
/// string `"1"` are distinct. Decimals are always finite and `-0.0` is
/// normalized to `0.0` at construction, so bitwise equality and hashing are
/// well defined.
#[derive(Debug, Clone)]
pub enum Literal {
    String(String),
    Decimal(f64),
    Integer(i64),
    Boolean(bool),
    Timestamp(NaiveDateTime),
}

impl Literal {
    /// Build a decimal literal, normalizing `-0.0`. Non-finite input is a
    /// caller bug; parsers reject it before construction.
    pub fn decimal(v: f64) -> Self {
        debug_assert!(v.is_finite(), "decimal literals must be finite");
        Literal::Decimal(if v == 0.0 { 0.0 } else { v })
    }

    pub fn datatype(&self) -> Datatype {
        match self {
            Literal::String(_) => Datatype::String,
            Literal::Decimal(_) => Datatype::Decimal,
            Literal::Integer(_) => Datatype::Integer,
            Literal::Boolean(_) => Datatype::Boolean,
            Literal::Timestamp(_) => Datatype::Timestamp,
        }
    }

    /// Parse an ISO-8601 timestamp: date is required, time is optional and a
    /// trailing `Z` is tolerated. Comparison is chronological.
    pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
        let s = s.strip_suffix('Z').unwrap_or(s);
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f") {
            return Some(dt);
        }
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M") {
            return Some(dt);
        }
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .ok()
            .and_then(|d| d.and_hms_opt(0, 0, 0))
    }

    /// Canonical lexical form, without quoting or datatype annotation.
    pub fn lexical(&self) -> String {
        match self {
            Literal::String(s) => s.clone(),
            Literal::Decimal(v) => fmt_decimal(*v),
            Literal::Integer(v) => v.to_string(),
            Literal::Boolean(b) => b.to_string(),
            Literal::Timestamp(t) => {
                if t.and_utc().timestamp_subsec_nanos() > 0 {
                    t.format("%Y-%m-%dT%H:%M:%S%.f").to_string()
                } else {
                    t.format("%Y-%m-%dT%H:%M:%S").to_string()
                }
            }
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Literal::String(_) => 0,
            Literal::Decimal(_) => 1,
            Literal::Integer(_) => 2,
            Literal::Boolean(_) => 3,
            Literal::Timestamp(_) => 4,
        }
    }
}

/// Canonical decimal rendering: always carries a decimal point so the form
/// re-parses as a decimal, never as an integer.
fn fmt_decimal(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') {
        s.push_str(".0");
    }
    s
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Literal::String(a), Literal::String(b)) => a == b,
            (Literal::Decimal(a), Literal::Decimal(b)) => a.to_bits() == b.to_bits(),
            (Literal::Integer(a), Literal::Integer(b)) => a == b,
            (Literal::Boolean(a), Literal::Boolean(b)) => a == b,
            (Literal::Timestamp(a), Literal::Timestamp(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Literal {}

impl std::hash::Hash for Literal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Literal::String(s) => s.hash(state),
            Literal::Decimal(v) => v.to_bits().hash(state),
            Literal::Integer(v) => v.hash(state),
            Literal::Boolean(b) => b.hash(state),
            Literal::Timestamp(t) => t.hash(state),
        }
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::String(a), Literal::String(b)) => a.cmp(b),
            (Literal::Decimal(a), Literal::Decimal(b)) => {
                a.partial_cmp(b).unwrap_or(Ordering::Equal)
            }
            (Literal::Integer(a), Literal::Integer(b)) => a.cmp(b),
            (Literal::Boolean(a), Literal::Boolean(b)) => a.cmp(b),
            (Literal::Timestamp(a), Literal::Timestamp(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A ground term: an IRI or a literal. Facts store only values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Iri(Iri),
    Literal(Literal),
}

impl Value {
    pub fn iri(iri: impl Into<String>) -> Self {
        Value::Iri(Iri::new(iri))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Value::Iri(iri) => Some(iri),
            Value::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Value::Iri(_) => None,
            Value::Literal(lit) => Some(lit),
        }
    }

    /// Display form: prefixed IRI when compactable, canonical literal otherwise.
    pub fn display(&self, prefixes: &PrefixMap) -> String {
        match self {
            Value::Iri(iri) => prefixes.display(iri),
            Value::Literal(lit) => match lit {
                Literal::String(s) => format!("\"{}\"", escape_string(s)),
                _ => lit.lexical(),
            },
        }
    }
}

impl From<Literal> for Value {
    fn from(lit: Literal) -> Self {
        Value::Literal(lit)
    }
}

impl From<Iri> for Value {
    fn from(iri: Iri) -> Self {
        Value::Iri(iri)
    }
}

/// A term as it appears in patterns and rule atoms: a value or a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
    Variable(String),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(Iri::new(iri))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    /// Convert to a ground value; `None` for variables.
    pub fn to_value(&self) -> Option<Value> {
        match self {
            Term::Iri(iri) => Some(Value::Iri(iri.clone())),
            Term::Literal(lit) => Some(Value::Literal(lit.clone())),
            Term::Variable(_) => None,
        }
    }

    pub fn display(&self, prefixes: &PrefixMap) -> String {
        match self {
            Term::Variable(v) => format!("?{v}"),
            Term::Iri(iri) => prefixes.display(iri),
            Term::Literal(_) => self.to_value().unwrap().display(prefixes),
        }
    }
}

impl From<Value> for Term {
    fn from(v: Value) -> Self {
        match v {
            Value::Iri(iri) => Term::Iri(iri),
            Value::Literal(lit) => Term::Literal(lit),
        }
    }
}

/// Compare two values for ORDER BY and filter semantics: integers and
/// decimals compare numerically, timestamps chronologically; everything else
/// falls back to the canonical (datatype, value) order.
pub fn value_order(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Literal(la), Value::Literal(lb)) => match (numeric(la), numeric(lb)) {
            (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
            _ => la.cmp(lb),
        },
        _ => a.cmp(b),
    }
}

fn numeric(lit: &Literal) -> Option<f64> {
    match lit {
        Literal::Integer(v) => Some(*v as f64),
        Literal::Decimal(v) => Some(*v),
        _ => None,
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// Registered prefix table mapping prefix labels to namespace IRIs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    map: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(prefix.into(), namespace.into());
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    /// Expand `prefix:local` to a full IRI.
    pub fn expand(&self, prefix: &str, local: &str) -> Option<Iri> {
        self.map.get(prefix).map(|ns| Iri::new(format!("{ns}{local}")))
    }

    /// Compact a full IRI to `prefix:local` using the longest matching
    /// namespace; `None` when no registered namespace is a prefix of it.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        let mut best: Option<(&str, &str)> = None;
        for (prefix, ns) in &self.map {
            if iri.as_str().starts_with(ns.as_str())
                && best.is_none_or(|(_, b)| ns.len() > b.len())
            {
                best = Some((prefix, ns));
            }
        }
        best.map(|(prefix, ns)| format!("{prefix}:{}", &iri.as_str()[ns.len()..]))
    }

    /// Compact form when possible, `<iri>` otherwise.
    pub fn display(&self, iri: &Iri) -> String {
        self.compact(iri).unwrap_or_else(|| format!("<{iri}>"))
    }

    /// Merge another table into this one; later entries win.
    pub fn extend(&mut self, other: &PrefixMap) {
        for (p, ns) in &other.map {
            self.map.insert(p.clone(), ns.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(p, ns)| (p.as_str(), ns.as_str()))
    }
}
