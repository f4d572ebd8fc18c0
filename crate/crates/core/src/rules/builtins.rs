//! SWRL builtin evaluation.
//!
//! Arithmetic builtins (`subtract`, `add`, `multiply`) bind their first
//! argument to the result of the remaining two when it is unbound, and test
//! equality against it when it is bound. Comparison builtins require all
//! arguments bound. Integer arithmetic is exact; mixed integer/decimal
//! operands promote to decimal.

use std::cmp::Ordering;

use thiserror::Error;

use crate::graph::Binding;
use crate::term::{Literal, Term, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Subtract,
    Add,
    Multiply,
    LessThan,
    LessThanOrEqual,
    GreaterThan,
    GreaterThanOrEqual,
    Equal,
    NotEqual,
}

impl Builtin {
    /// Resolve a `swrlb:` local name.
    pub fn lookup(name: &str) -> Option<Builtin> {
        Some(match name {
            "subtract" => Builtin::Subtract,
            "add" => Builtin::Add,
            "multiply" => Builtin::Multiply,
            "lessThan" => Builtin::LessThan,
            "lessThanOrEqual" => Builtin::LessThanOrEqual,
            "greaterThan" => Builtin::GreaterThan,
            "greaterThanOrEqual" => Builtin::GreaterThanOrEqual,
            "equal" => Builtin::Equal,
            "notEqual" => Builtin::NotEqual,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Subtract => "subtract",
            Builtin::Add => "add",
            Builtin::Multiply => "multiply",
            Builtin::LessThan => "lessThan",
            Builtin::LessThanOrEqual => "lessThanOrEqual",
            Builtin::GreaterThan => "greaterThan",
            Builtin::GreaterThanOrEqual => "greaterThanOrEqual",
            Builtin::Equal => "equal",
            Builtin::NotEqual => "notEqual",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Builtin::Subtract | Builtin::Add | Builtin::Multiply => 3,
            _ => 2,
        }
    }

    /// Whether the first argument may be unbound and get bound to a result.
    pub fn is_value_generating(&self) -> bool {
        matches!(self, Builtin::Subtract | Builtin::Add | Builtin::Multiply)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuiltinError {
    #[error("swrlb:{builtin}: argument {position} is unbound")]
    UnboundArgument {
        builtin: &'static str,
        position: usize,
    },
    #[error("swrlb:{builtin}: argument {position} is not comparable here: {value}")]
    NonNumericArgument {
        builtin: &'static str,
        position: usize,
        value: String,
    },
    #[error("swrlb:{builtin}: integer overflow")]
    Overflow { builtin: &'static str },
}

#[derive(Debug, Clone, Copy)]
enum Num {
    Int(i64),
    Dec(f64),
}

impl Num {
    fn to_f64(self) -> f64 {
        match self {
            Num::Int(v) => v as f64,
            Num::Dec(v) => v,
        }
    }

    fn to_literal(self) -> Literal {
        match self {
            Num::Int(v) => Literal::Integer(v),
            Num::Dec(v) => Literal::decimal(v),
        }
    }
}

/// Evaluate a builtin over `args`, resolving variables through `binding`.
/// Returns whether the builtin holds; a value-generating builtin with an
/// unbound first argument extends `binding` and holds.
pub fn evaluate_builtin(
    builtin: Builtin,
    args: &[Term],
    binding: &mut Binding,
) -> Result<bool, BuiltinError> {
    debug_assert_eq!(args.len(), builtin.arity());
    let resolve = |term: &Term| -> Option<Value> {
        match term {
            Term::Variable(v) => binding.get(v).cloned(),
            other => other.to_value(),
        }
    };

    if builtin.is_value_generating() {
        let a = require_numeric(builtin, 2, resolve(&args[1]))?;
        let b = require_numeric(builtin, 3, resolve(&args[2]))?;
        let result = match (builtin, a, b) {
            (Builtin::Subtract, Num::Int(x), Num::Int(y)) => Num::Int(
                x.checked_sub(y)
                    .ok_or(BuiltinError::Overflow { builtin: builtin.name() })?,
            ),
            (Builtin::Add, Num::Int(x), Num::Int(y)) => Num::Int(
                x.checked_add(y)
                    .ok_or(BuiltinError::Overflow { builtin: builtin.name() })?,
            ),
            (Builtin::Multiply, Num::Int(x), Num::Int(y)) => Num::Int(
                x.checked_mul(y)
                    .ok_or(BuiltinError::Overflow { builtin: builtin.name() })?,
            ),
            (Builtin::Subtract, x, y) => Num::Dec(x.to_f64() - y.to_f64()),
            (Builtin::Add, x, y) => Num::Dec(x.to_f64() + y.to_f64()),
            (Builtin::Multiply, x, y) => Num::Dec(x.to_f64() * y.to_f64()),
            _ => unreachable!("value-generating builtins only"),
        };
        return match resolve(&args[0]) {
            Some(existing) => {
                let target = require_numeric(builtin, 1, Some(existing))?;
                Ok(numeric_cmp(target, result) == Ordering::Equal)
            }
            None => match &args[0] {
                Term::Variable(v) => {
                    binding.insert(v.clone(), Value::Literal(result.to_literal()));
                    Ok(true)
                }
                // Unreachable for ground terms: resolve() always returns them.
                _ => unreachable!("ground first argument always resolves"),
            },
        };
    }

    let left = resolve(&args[0]).ok_or(BuiltinError::UnboundArgument {
        builtin: builtin.name(),
        position: 1,
    })?;
    let right = resolve(&args[1]).ok_or(BuiltinError::UnboundArgument {
        builtin: builtin.name(),
        position: 2,
    })?;

    match builtin {
        Builtin::Equal => Ok(values_equal(&left, &right)),
        Builtin::NotEqual => Ok(!values_equal(&left, &right)),
        _ => {
            let ordering = ordered_cmp(builtin, &left, &right)?;
            Ok(match builtin {
                Builtin::LessThan => ordering == Ordering::Less,
                Builtin::LessThanOrEqual => ordering != Ordering::Greater,
                Builtin::GreaterThan => ordering == Ordering::Greater,
                Builtin::GreaterThanOrEqual => ordering != Ordering::Less,
                _ => unreachable!(),
            })
        }
    }
}

fn require_numeric(
    builtin: Builtin,
    position: usize,
    value: Option<Value>,
) -> Result<Num, BuiltinError> {
    let value = value.ok_or(BuiltinError::UnboundArgument {
        builtin: builtin.name(),
        position,
    })?;
    match value {
        Value::Literal(Literal::Integer(v)) => Ok(Num::Int(v)),
        Value::Literal(Literal::Decimal(v)) => Ok(Num::Dec(v)),
        other => Err(BuiltinError::NonNumericArgument {
            builtin: builtin.name(),
            position,
            value: format!("{other:?}"),
        }),
    }
}

fn numeric_cmp(a: Num, b: Num) -> Ordering {
    match (a, b) {
        (Num::Int(x), Num::Int(y)) => x.cmp(&y),
        (x, y) => x
            .to_f64()
            .partial_cmp(&y.to_f64())
            .unwrap_or(Ordering::Equal),
    }
}

/// Equality with integer-to-decimal promotion; across non-numeric datatypes
/// values are simply unequal (`1` is not `"1"`).
fn values_equal(a: &Value, b: &Value) -> bool {
    match (as_num(a), as_num(b)) {
        (Some(x), Some(y)) => numeric_cmp(x, y) == Ordering::Equal,
        _ => a == b,
    }
}

fn as_num(v: &Value) -> Option<Num> {
    match v {
        Value::Literal(Literal::Integer(i)) => Some(Num::Int(*i)),
        Value::Literal(Literal::Decimal(d)) => Some(Num::Dec(*d)),
        _ => None,
    }
}

fn ordered_cmp(builtin: Builtin, a: &Value, b: &Value) -> Result<Ordering, BuiltinError> {
    if let (Some(x), Some(y)) = (as_num(a), as_num(b)) {
        return Ok(numeric_cmp(x, y));
    }
    if let (
        Value::Literal(Literal::Timestamp(x)),
        Value::Literal(Literal::Timestamp(y)),
    ) = (a, b)
    {
        return Ok(x.cmp(y));
    }
    Err(BuiltinError::NonNumericArgument {
        builtin: builtin.name(),
        position: 1,
        value: format!("{a:?} vs {b:?}"),
    })
}
