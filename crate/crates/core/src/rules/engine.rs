//! Semi-naive forward chaining to fixpoint with derivation traces.
//!
//! Each round matches rule bodies against the graph as it stood at the start
//! of the round (asserted facts plus facts inferred in previous rounds),
//! requiring at least one non-builtin atom to match a fact new in the last
//! round. Builtins evaluate left-to-right as the join proceeds. Inference is
//! monotone: facts are only ever added, and the fixpoint fact set does not
//! depend on rule order.

use thiserror::Error;

use crate::graph::{Binding, Fact, Graph, GraphError, Insertion, Origin, TriplePattern};
use crate::rules::{evaluate_builtin, Atom, BuiltinError, Rule};
use crate::term::{Iri, PrefixMap, Term, Value};
use crate::vocab;

/// Safety caps for a forward-chaining run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_iterations: usize,
    pub max_facts: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_iterations: 1000,
            max_facts: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Iterations,
    Facts,
}

/// One derivation: a rule fired under a binding and produced a fact.
/// `fresh` is false when the produced fact already existed (duplicate
/// derivations are recorded but do not extend the graph).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub binding: Binding,
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Value,
    pub iteration: usize,
    pub fresh: bool,
}

impl TraceStep {
    pub fn fact_display(&self, prefixes: &PrefixMap) -> String {
        format!(
            "{} {} {}",
            prefixes.display(&self.subject),
            prefixes.display(&self.predicate),
            self.object.display(prefixes)
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
    /// Rounds executed, including the final round that added nothing.
    pub rounds: usize,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("inference aborted: {limit:?} limit exceeded")]
    LimitExceeded {
        limit: LimitKind,
        /// Trace of everything derived before the abort; the graph itself is
        /// restored to its pre-call state.
        partial: DerivationTrace,
    },
    #[error("rule {rule}: {source}")]
    Builtin {
        rule: String,
        #[source]
        source: BuiltinError,
    },
    #[error("rule {rule} produced an unassertable fact: {source}")]
    Assert {
        rule: String,
        #[source]
        source: GraphError,
    },
    #[error("rule {rule}: head variable ?{variable} is bound to a literal in subject position")]
    LiteralSubject { rule: String, variable: String },
}

/// Run the rules to fixpoint. On success the inferred facts remain in the
/// graph and are returned together with the trace; on any error the graph is
/// restored to its pre-call state.
pub fn forward_chain(
    graph: &mut Graph,
    rules: &[Rule],
    limits: &Limits,
) -> Result<(Vec<Fact>, DerivationTrace), EngineError> {
    let base = graph.len();
    let mut trace = DerivationTrace::default();

    let result = run(graph, rules, limits, base, &mut trace);
    match result {
        Ok(()) => {
            let inferred = graph.facts()[base..].to_vec();
            Ok((inferred, trace))
        }
        Err(err) => {
            graph.truncate(base);
            Err(err)
        }
    }
}

fn run(
    graph: &mut Graph,
    rules: &[Rule],
    limits: &Limits,
    base: usize,
    trace: &mut DerivationTrace,
) -> Result<(), EngineError> {
    let mut old_end = 0usize;
    let mut delta_end = graph.len();
    let mut round = 0usize;
    loop {
        round += 1;
        if round > limits.max_iterations {
            return Err(EngineError::LimitExceeded {
                limit: LimitKind::Iterations,
                partial: trace.clone(),
            });
        }
        let round_start = graph.len();
        for rule in rules {
            apply_rule(graph, rule, old_end, delta_end, round, base, limits, trace)?;
        }
        trace.rounds = round;
        if graph.len() == round_start {
            return Ok(());
        }
        old_end = delta_end;
        delta_end = graph.len();
    }
}

#[allow(clippy::too_many_arguments)]
fn apply_rule(
    graph: &mut Graph,
    rule: &Rule,
    old_end: usize,
    delta_end: usize,
    round: usize,
    base: usize,
    limits: &Limits,
    trace: &mut DerivationTrace,
) -> Result<(), EngineError> {
    let delta_positions: Vec<usize> = rule
        .body
        .iter()
        .enumerate()
        .filter(|(_, atom)| !atom.is_builtin())
        .map(|(i, _)| i)
        .collect();

    // A body of builtins and constants can only fire once, in round one.
    if delta_positions.is_empty() {
        if round == 1 {
            let solutions = join(graph, rule, None, old_end, delta_end)?;
            assert_heads(graph, rule, solutions, round, base, limits, trace)?;
        }
        return Ok(());
    }

    for &dpos in &delta_positions {
        // Round one has no old facts, so only the first position is needed.
        if round == 1 && dpos != delta_positions[0] {
            break;
        }
        let solutions = join(graph, rule, Some(dpos), old_end, delta_end)?;
        assert_heads(graph, rule, solutions, round, base, limits, trace)?;
    }
    Ok(())
}

/// Evaluate the body left-to-right. Non-builtin atoms before `dpos` match
/// facts older than the delta, the atom at `dpos` matches only delta facts,
/// and later atoms match anything visible this round.
fn join(
    graph: &Graph,
    rule: &Rule,
    dpos: Option<usize>,
    old_end: usize,
    delta_end: usize,
) -> Result<Vec<Binding>, EngineError> {
    let mut solutions = vec![Binding::new()];
    for (idx, atom) in rule.body.iter().enumerate() {
        if solutions.is_empty() {
            return Ok(solutions);
        }
        match atom {
            Atom::Builtin { builtin, args } => {
                let mut next = Vec::new();
                for mut binding in solutions {
                    let held = evaluate_builtin(*builtin, args, &mut binding).map_err(|source| {
                        EngineError::Builtin {
                            rule: rule.name.clone(),
                            source,
                        }
                    })?;
                    if held {
                        next.push(binding);
                    }
                }
                solutions = next;
            }
            other => {
                let pattern = atom_pattern(other);
                let range = match dpos {
                    Some(d) if idx < d => 0..old_end,
                    Some(d) if idx == d => old_end..delta_end,
                    _ => 0..delta_end,
                };
                let mut next = Vec::new();
                for binding in &solutions {
                    for id in graph.match_facts_in_range(&pattern, binding, range.clone()) {
                        let extended = crate::graph::unify(&pattern, &graph.facts()[id], binding)
                            .expect("ids come from a successful match");
                        next.push(extended);
                    }
                }
                solutions = next;
            }
        }
    }
    Ok(solutions)
}

fn assert_heads(
    graph: &mut Graph,
    rule: &Rule,
    solutions: Vec<Binding>,
    round: usize,
    base: usize,
    limits: &Limits,
    trace: &mut DerivationTrace,
) -> Result<(), EngineError> {
    for binding in solutions {
        let (subject, predicate, object) = instantiate_head(rule, &binding)?;
        let (outcome, added) = graph
            .assert_tracked(
                subject.clone(),
                predicate.clone(),
                object.clone(),
                Origin::Inferred(rule.name.clone()),
            )
            .map_err(|source| EngineError::Assert {
                rule: rule.name.clone(),
                source,
            })?;
        trace.steps.push(TraceStep {
            rule: rule.name.clone(),
            binding: binding.clone(),
            subject,
            predicate,
            object,
            iteration: round,
            fresh: outcome == Insertion::Added,
        });
        // Materialized supertype facts are traced too, so every inferred
        // fact in the graph has at least one trace step.
        for id in added.into_iter().skip(1) {
            let fact = &graph.facts()[id];
            trace.steps.push(TraceStep {
                rule: rule.name.clone(),
                binding: binding.clone(),
                subject: fact.subject.clone(),
                predicate: fact.predicate.clone(),
                object: fact.object.clone(),
                iteration: round,
                fresh: true,
            });
        }
        if graph.len() - base > limits.max_facts {
            return Err(EngineError::LimitExceeded {
                limit: LimitKind::Facts,
                partial: trace.clone(),
            });
        }
    }
    Ok(())
}

fn atom_pattern(atom: &Atom) -> TriplePattern {
    match atom {
        Atom::Class { class, arg } => TriplePattern::new(
            arg.clone(),
            Term::iri(vocab::RDF_TYPE),
            Term::Iri(class.clone()),
        ),
        Atom::Property {
            predicate,
            subject,
            object,
        } => TriplePattern::new(subject.clone(), Term::Iri(predicate.clone()), object.clone()),
        Atom::Builtin { .. } => unreachable!("builtins are not patterns"),
    }
}

fn instantiate_head(rule: &Rule, binding: &Binding) -> Result<(Iri, Iri, Value), EngineError> {
    let ground = |term: &Term| -> Value {
        match term {
            Term::Variable(v) => binding
                .get(v)
                .cloned()
                .expect("safety check guarantees bound head variables"),
            other => other.to_value().expect("ground term"),
        }
    };
    let as_subject = |term: &Term| -> Result<Iri, EngineError> {
        match ground(term) {
            Value::Iri(iri) => Ok(iri),
            Value::Literal(_) => Err(EngineError::LiteralSubject {
                rule: rule.name.clone(),
                variable: match term {
                    Term::Variable(v) => v.clone(),
                    _ => String::new(),
                },
            }),
        }
    };
    match &rule.head {
        Atom::Class { class, arg } => Ok((
            as_subject(arg)?,
            Iri::new(vocab::RDF_TYPE),
            Value::Iri(class.clone()),
        )),
        Atom::Property {
            predicate,
            subject,
            object,
        } => Ok((
            as_subject(subject)?,
            predicate.clone(),
            ground(object),
        )),
        Atom::Builtin { .. } => unreachable!("parser rejects builtin heads"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::parse_rules;
    use crate::term::Literal;
    use crate::turtle;
    use crate::vocab::iri;

    const HEADER: &str = "@prefix ccpo: <http://www.semanticweb.org/ccpo#> .\n";

    fn load(text: &str) -> Graph {
        let mut graph = Graph::with_ccpo_schema();
        turtle::load_str(&mut graph, &format!("{HEADER}{text}")).unwrap();
        graph
    }

    fn eol_product(rsl: i64, asl: i64) -> Graph {
        load(&format!(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife {rsl} ; ccpo:actualServiceLife {asl} .\n"
        ))
    }

    #[test]
    fn empty_ruleset_reaches_fixpoint_in_one_round() {
        let mut graph = eol_product(25, 24);
        let (inferred, trace) = forward_chain(&mut graph, &[], &Limits::default()).unwrap();
        assert!(inferred.is_empty());
        assert_eq!(trace.rounds, 1);
    }

    #[test]
    fn rule1_derives_at_eol_with_trace() {
        let mut graph = eol_product(25, 24);
        let rules = parse_rules(
            "Rule1: Product(?p) ^ referenceServiceLife(?p,?r) ^ actualServiceLife(?p,?a) ^ swrlb:subtract(?diff,?r,?a) ^ swrlb:lessThanOrEqual(?diff,1) -> atEoL(?p,true)",
        )
        .unwrap();
        let (inferred, trace) = forward_chain(&mut graph, &rules, &Limits::default()).unwrap();
        assert_eq!(inferred.len(), 1);
        assert_eq!(inferred[0].predicate, iri(vocab::AT_EOL));
        assert_eq!(inferred[0].origin, Origin::Inferred("Rule1".into()));
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(
            trace.steps[0].binding.get("diff"),
            Some(&Value::Literal(Literal::Integer(1)))
        );
        assert_eq!(trace.rounds, 2);
    }

    #[test]
    fn chained_rules_fire_across_rounds() {
        let mut graph = load(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 24 ; ccpo:hasHealthState ccpo:green .\n",
        );
        let rules = parse_rules(
            "Rule1: Product(?p) ^ referenceServiceLife(?p,?r) ^ actualServiceLife(?p,?a) ^ swrlb:subtract(?diff,?r,?a) ^ swrlb:lessThanOrEqual(?diff,1) -> atEoL(?p,true)\n\
             Rule2.i: Product(?p) ^ atEoL(?p,true) ^ hasHealthState(?p,green) ^ actualServiceLife(?p,?a) ^ referenceServiceLife(?p,?r) ^ swrlb:subtract(?diff,?r,?a) ^ swrlb:greaterThan(?diff,0) -> suggestedEoLRoute(?p,StrongReuseSuggestion)",
        )
        .unwrap();
        let (inferred, trace) = forward_chain(&mut graph, &rules, &Limits::default()).unwrap();
        let predicates: Vec<&str> = inferred.iter().map(|f| f.predicate.as_str()).collect();
        assert_eq!(predicates, vec![vocab::AT_EOL, vocab::SUGGESTED_EOL_ROUTE]);
        assert_eq!(trace.rounds, 3);
    }

    #[test]
    fn mutually_recursive_class_rules_terminate() {
        let mut graph = load("ccpo:x a ccpo:Material .\n");
        let rules = parse_rules(
            "AB: Material(?x) -> Actor(?x)\nBA: Actor(?x) -> Material(?x)",
        )
        .unwrap();
        let (inferred, trace) = forward_chain(&mut graph, &rules, &Limits::default()).unwrap();
        assert_eq!(inferred.len(), 1);
        assert!(trace.rounds <= 3);
    }

    #[test]
    fn iteration_limit_restores_the_graph() {
        let mut graph = load(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 24 ; ccpo:hasHealthState ccpo:green .\n",
        );
        let before = graph.len();
        let rules = parse_rules(
            "Rule1: Product(?p) ^ referenceServiceLife(?p,?r) ^ actualServiceLife(?p,?a) ^ swrlb:subtract(?diff,?r,?a) ^ swrlb:lessThanOrEqual(?diff,1) -> atEoL(?p,true)\n\
             Rule2.ii: Product(?p) ^ atEoL(?p,true) -> suggestedEoLRoute(?p,WeakReuse_ConsiderRefurbishmentSoon)",
        )
        .unwrap();
        let limits = Limits {
            max_iterations: 1,
            max_facts: 1_000_000,
        };
        let err = forward_chain(&mut graph, &rules, &limits).unwrap_err();
        match err {
            EngineError::LimitExceeded { limit, partial } => {
                assert_eq!(limit, LimitKind::Iterations);
                assert!(!partial.steps.is_empty());
            }
            other => panic!("expected limit error, got {other:?}"),
        }
        assert_eq!(graph.len(), before);
    }

    #[test]
    fn fact_cap_restores_the_graph() {
        let mut graph = load("ccpo:x a ccpo:Material .\nccpo:y a ccpo:Material .\n");
        let before = graph.len();
        let rules = parse_rules("AB: Material(?x) -> Actor(?x)").unwrap();
        let limits = Limits {
            max_iterations: 1000,
            max_facts: 1,
        };
        let err = forward_chain(&mut graph, &rules, &limits).unwrap_err();
        assert!(matches!(
            err,
            EngineError::LimitExceeded {
                limit: LimitKind::Facts,
                ..
            }
        ));
        assert_eq!(graph.len(), before);
    }

    #[test]
    fn duplicate_derivations_reach_the_trace_but_not_the_graph() {
        // Both rules derive the same fact; the second derivation is traced
        // as non-fresh.
        let mut graph = load("ccpo:x a ccpo:Material .\n");
        let rules = parse_rules(
            "A1: Material(?x) -> Actor(?x)\nA2: Material(?x) -> Actor(?x)",
        )
        .unwrap();
        let (inferred, trace) = forward_chain(&mut graph, &rules, &Limits::default()).unwrap();
        assert_eq!(inferred.len(), 1);
        let fresh: Vec<bool> = trace.steps.iter().map(|s| s.fresh).collect();
        assert_eq!(fresh, vec![true, false]);
    }

    #[test]
    fn class_heads_materialize_superclasses_with_trace_steps() {
        let mut graph = load("ccpo:x a ccpo:Material .\n");
        let rules = parse_rules("C: Material(?x) -> Component(?x)").unwrap();
        let (inferred, trace) = forward_chain(&mut graph, &rules, &Limits::default()).unwrap();
        // Component plus materialized Product.
        assert_eq!(inferred.len(), 2);
        assert_eq!(trace.steps.len(), 2);
        assert!(trace.steps.iter().all(|s| s.fresh));
    }

    #[test]
    fn trace_replay_rederives_each_recorded_fact() {
        let mut graph = load(
            "ccpo:p a ccpo:Product ; ccpo:referenceServiceLife 25 ; ccpo:actualServiceLife 24 ; ccpo:hasHealthState ccpo:green ; ccpo:hasEoLStrategy ccpo:doc1 .\nccpo:doc1 a ccpo:Document .\n",
        );
        let rules = crate::eol::default_ruleset(true);
        let (_, trace) = forward_chain(&mut graph, &rules, &Limits::default()).unwrap();
        assert!(!trace.steps.is_empty());
        for step in &trace.steps {
            let rule = rules
                .iter()
                .find(|r| r.name == step.rule)
                .expect("trace names a known rule");
            // The head instantiated under the recorded binding is exactly
            // the recorded fact.
            let (s, p, o) = instantiate_head(rule, &step.binding).unwrap();
            assert_eq!((s, p, o), (step.subject.clone(), step.predicate.clone(), step.object.clone()));
            // Every non-builtin body atom holds in the final graph (which
            // contains the step's pre-state, since inference is monotone),
            // and the builtins hold under the binding.
            for atom in &rule.body {
                match atom {
                    Atom::Builtin { builtin, args } => {
                        let mut b = step.binding.clone();
                        assert!(evaluate_builtin(*builtin, args, &mut b).unwrap());
                    }
                    other => {
                        let pattern = atom_pattern(other);
                        let matched =
                            graph.match_facts_in_range(&pattern, &step.binding, 0..graph.len());
                        assert!(!matched.is_empty(), "body atom unsupported by graph");
                    }
                }
            }
        }
    }
}
