//! End-of-life decision layer: the health model, the default ruleset with
//! its reconciliation extensions, waste-hierarchy priority resolution, and
//! an independent decision oracle for cross-validation.

mod config;
mod decide;
mod health;
mod oracle;

pub use config::{DecisionConfig, EngineConfig, HealthConfig};
pub use decide::{decide, explain_report, DecideError, DecisionReport};
pub use health::{
    classify_health, health_value, HealthError, HealthModelParams, HealthRating, Thresholds,
};
pub use oracle::{oracle_decision, MarketDemand, ProductState};

use crate::rules::{parse_rules, Rule};
use crate::term::Iri;
use crate::vocab;

/// Text of the bundled default ruleset (`rules/table2.rules`).
pub const DEFAULT_RULESET_TEXT: &str = include_str!("../../rules/table2.rules");

/// Rule-name prefix marking the reconciliation rules, separable by
/// configuration.
pub const RECONCILIATION_PREFIX: &str = "recon:";

/// An end-of-life route. Priority ranks follow the waste hierarchy: reuse
/// before manufacturer strategy before recycling before landfill. The
/// intermediate classifications rank 99 and are never a final
/// recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EolRoute {
    StrongReuseSuggestion,
    WeakReuseConsiderRefurbishmentSoon,
    FollowManufacturerEolStrategy,
    RecycleDueToHighMarketDemand,
    SendToLandfill,
    CannotReuseDueToPoorProductHealth,
    DoNotRecycleDueToLowDemand,
}

impl EolRoute {
    pub const ALL: [EolRoute; 7] = [
        EolRoute::StrongReuseSuggestion,
        EolRoute::WeakReuseConsiderRefurbishmentSoon,
        EolRoute::FollowManufacturerEolStrategy,
        EolRoute::RecycleDueToHighMarketDemand,
        EolRoute::SendToLandfill,
        EolRoute::CannotReuseDueToPoorProductHealth,
        EolRoute::DoNotRecycleDueToLowDemand,
    ];

    pub fn priority_rank(&self) -> u8 {
        match self {
            EolRoute::StrongReuseSuggestion => 1,
            EolRoute::WeakReuseConsiderRefurbishmentSoon => 1,
            EolRoute::FollowManufacturerEolStrategy => 2,
            EolRoute::RecycleDueToHighMarketDemand => 3,
            EolRoute::SendToLandfill => 4,
            EolRoute::CannotReuseDueToPoorProductHealth => 99,
            EolRoute::DoNotRecycleDueToLowDemand => 99,
        }
    }

    pub fn is_intermediate(&self) -> bool {
        self.priority_rank() == 99
    }

    /// The route individual's name as printed in the ruleset.
    pub fn name(&self) -> &'static str {
        match self {
            EolRoute::StrongReuseSuggestion => "StrongReuseSuggestion",
            EolRoute::WeakReuseConsiderRefurbishmentSoon => "WeakReuse_ConsiderRefurbishmentSoon",
            EolRoute::FollowManufacturerEolStrategy => "FollowManufacturerEoLStrategy",
            EolRoute::RecycleDueToHighMarketDemand => "RecycleDueToHighMarketDemand",
            EolRoute::SendToLandfill => "SendToLandfill",
            EolRoute::CannotReuseDueToPoorProductHealth => "CannotReuseDueToPoorProductHealth",
            EolRoute::DoNotRecycleDueToLowDemand => "DoNotRecycleDueToLowDemand",
        }
    }

    pub fn iri(&self) -> Iri {
        Iri::new(format!("{}{}", vocab::CCPO_NS, self.name()))
    }

    pub fn from_iri(iri: &Iri) -> Option<EolRoute> {
        EolRoute::ALL.into_iter().find(|r| &r.iri() == iri)
    }
}

/// The bundled ruleset: the nine printed rules, plus the three
/// reconciliation rules when `include_reconciliation` is set.
pub fn default_ruleset(include_reconciliation: bool) -> Vec<Rule> {
    let rules = parse_rules(DEFAULT_RULESET_TEXT).expect("bundled ruleset parses");
    rules
        .into_iter()
        .filter(|r| include_reconciliation || !r.name.starts_with(RECONCILIATION_PREFIX))
        .collect()
}

/// Like [`default_ruleset`], with the at-EoL window rewritten: the window is
/// the bound of Rule1's `lessThanOrEqual(?diff, window)` guard.
pub fn default_ruleset_with_window(include_reconciliation: bool, window: i64) -> Vec<Rule> {
    use crate::rules::{Atom, Builtin};
    use crate::term::{Literal, Term};

    let mut rules = default_ruleset(include_reconciliation);
    if window != 1 {
        for rule in &mut rules {
            if rule.name != "Rule1" {
                continue;
            }
            for atom in &mut rule.body {
                if let Atom::Builtin {
                    builtin: Builtin::LessThanOrEqual,
                    args,
                } = atom
                {
                    args[1] = Term::Literal(Literal::Integer(window));
                }
            }
        }
    }
    rules
}
