//! SWRL-style rules: parsing, builtin evaluation, and forward chaining.

mod builtins;
mod engine;
mod parser;

pub use builtins::{evaluate_builtin, Builtin, BuiltinError};
pub use engine::{forward_chain, DerivationTrace, EngineError, LimitKind, Limits, TraceStep};
pub use parser::parse_rules;

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::term::{Iri, PrefixMap, Term};
use crate::vocab;

/// A body or head atom. Class atoms take one argument, property atoms two;
/// builtin arity is fixed per builtin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Class {
        class: Iri,
        arg: Term,
    },
    Property {
        predicate: Iri,
        subject: Term,
        object: Term,
    },
    Builtin {
        builtin: Builtin,
        args: Vec<Term>,
    },
}

impl Atom {
    pub fn variables(&self) -> Vec<&str> {
        fn collect<'a>(terms: &[&'a Term]) -> Vec<&'a str> {
            terms
                .iter()
                .filter_map(|t| match t {
                    Term::Variable(v) => Some(v.as_str()),
                    _ => None,
                })
                .collect()
        }
        match self {
            Atom::Class { arg, .. } => collect(&[arg]),
            Atom::Property {
                subject, object, ..
            } => collect(&[subject, object]),
            Atom::Builtin { args, .. } => collect(&args.iter().collect::<Vec<_>>()),
        }
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self, Atom::Builtin { .. })
    }

    pub fn display(&self, prefixes: &PrefixMap) -> String {
        match self {
            Atom::Class { class, arg } => {
                format!("{}({})", prefixes.display(class), arg.display(prefixes))
            }
            Atom::Property {
                predicate,
                subject,
                object,
            } => format!(
                "{}({}, {})",
                prefixes.display(predicate),
                subject.display(prefixes),
                object.display(prefixes)
            ),
            Atom::Builtin { builtin, args } => {
                let args: Vec<String> = args.iter().map(|a| a.display(prefixes)).collect();
                format!("swrlb:{}({})", builtin.name(), args.join(", "))
            }
        }
    }
}

/// A named implication: conjunctive body, single non-builtin head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub body: Vec<Atom>,
    pub head: Atom,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown prefix '{prefix}' at {line}:{col}")]
    UnknownPrefix {
        line: usize,
        col: usize,
        prefix: String,
    },
    #[error("unknown builtin swrlb:{name} at {line}:{col}")]
    UnknownBuiltin {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("builtin swrlb:{name} takes {expected} arguments, got {actual} (at {line}:{col})")]
    BuiltinArity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error("unsafe rule {rule}: head variable ?{variable} is not bound by the body")]
    UnsafeHeadVariable { rule: String, variable: String },
    #[error("unsafe rule {rule}: builtin input ?{variable} is unbound at its position")]
    UnsafeBuiltinInput { rule: String, variable: String },
    #[error("rule {rule}: builtins cannot appear in the head")]
    BuiltinHead { rule: String },
    #[error(
        "rule {rule}: builtin-computed value feeds a predicate that can re-derive its own inputs"
    )]
    RecursiveValueGeneration { rule: String },
}

impl Rule {
    /// Safety: every head variable must be bound by a non-builtin body atom
    /// or by a value-generating builtin whose own inputs are bound, checking
    /// builtins left-to-right as the engine evaluates them.
    ///
    /// Returns the set of variables bound by value-generating builtins.
    pub fn check_safety(&self) -> Result<BTreeSet<String>, RuleError> {
        let mut bound: HashSet<String> = HashSet::new();
        let mut generated = BTreeSet::new();
        for atom in &self.body {
            match atom {
                Atom::Builtin { builtin, args } => {
                    let required = if builtin.is_value_generating() {
                        &args[1..]
                    } else {
                        &args[..]
                    };
                    for term in required {
                        if let Term::Variable(v) = term {
                            if !bound.contains(v) {
                                return Err(RuleError::UnsafeBuiltinInput {
                                    rule: self.name.clone(),
                                    variable: v.clone(),
                                });
                            }
                        }
                    }
                    if builtin.is_value_generating() {
                        if let Term::Variable(v) = &args[0] {
                            if bound.insert(v.clone()) {
                                generated.insert(v.clone());
                            }
                        }
                    }
                }
                other => {
                    for v in other.variables() {
                        bound.insert(v.to_string());
                    }
                }
            }
        }
        if self.head.is_builtin() {
            return Err(RuleError::BuiltinHead {
                rule: self.name.clone(),
            });
        }
        for v in self.head.variables() {
            if !bound.contains(v) {
                return Err(RuleError::UnsafeHeadVariable {
                    rule: self.name.clone(),
                    variable: v.to_string(),
                });
            }
        }
        Ok(generated)
    }
}

/// Predicate identity for the ruleset dependency graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PredKey {
    Class(Iri),
    Property(Iri),
}

fn atom_key(atom: &Atom) -> Option<PredKey> {
    match atom {
        Atom::Class { class, .. } => Some(PredKey::Class(class.clone())),
        Atom::Property {
            predicate, object, ..
        } => {
            if predicate.as_str() == vocab::RDF_TYPE {
                match object {
                    Term::Iri(class) => Some(PredKey::Class(class.clone())),
                    _ => Some(PredKey::Property(predicate.clone())),
                }
            } else {
                Some(PredKey::Property(predicate.clone()))
            }
        }
        Atom::Builtin { .. } => None,
    }
}

/// Ruleset-level checks: per-rule safety, plus the termination guard — a
/// rule whose head carries a builtin-computed value must not (transitively)
/// feed any of its own body predicates, otherwise each fixpoint round could
/// mint fresh values forever.
pub fn check_ruleset(rules: &[Rule]) -> Result<(), RuleError> {
    let mut generated_per_rule = Vec::with_capacity(rules.len());
    for rule in rules {
        generated_per_rule.push(rule.check_safety()?);
    }

    // Dependency edges: body predicate -> head predicate.
    let mut edges: HashMap<PredKey, HashSet<PredKey>> = HashMap::new();
    for rule in rules {
        let Some(head_key) = atom_key(&rule.head) else {
            continue;
        };
        for atom in &rule.body {
            if let Some(body_key) = atom_key(atom) {
                edges.entry(body_key).or_default().insert(head_key.clone());
            }
        }
    }

    for (rule, generated) in rules.iter().zip(&generated_per_rule) {
        let head_carries_value = rule
            .head
            .variables()
            .iter()
            .any(|v| generated.contains(*v));
        if !head_carries_value {
            continue;
        }
        let Some(head_key) = atom_key(&rule.head) else {
            continue;
        };
        let body_keys: HashSet<PredKey> =
            rule.body.iter().filter_map(atom_key).collect();
        // BFS from the head predicate through the dependency graph.
        let mut seen = HashSet::new();
        let mut stack = vec![head_key];
        while let Some(key) = stack.pop() {
            if body_keys.contains(&key) {
                return Err(RuleError::RecursiveValueGeneration {
                    rule: rule.name.clone(),
                });
            }
            if !seen.insert(key.clone()) {
                continue;
            }
            if let Some(next) = edges.get(&key) {
                stack.extend(next.iter().cloned());
            }
        }
    }
    Ok(())
}
