//! Rule-engine-free transcription of the end-of-life decision procedure,
//! used as an independent oracle against the rule-based path.
//!
//! A product is at end of life when its reference service life minus its
//! actual service life is at most one year. Healthy (green) products still
//! short of their reference life get a strong reuse recommendation; green
//! products at or past it, and amber products, get a weak one. Red products
//! cannot be reused: the manufacturer strategy is followed when one exists,
//! otherwise the product is recycled when market demand is high, or average
//! with design for disassembly, and landfilled when not. The recycle branch
//! precedence is read as `high or (avg and dfd)`.

use crate::eol::health::HealthRating;
use crate::eol::EolRoute;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarketDemand {
    High,
    Avg,
    Low,
}

impl MarketDemand {
    pub fn name(&self) -> &'static str {
        match self {
            MarketDemand::High => "high",
            MarketDemand::Avg => "avg",
            MarketDemand::Low => "low",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "high" => Some(MarketDemand::High),
            "avg" => Some(MarketDemand::Avg),
            "low" => Some(MarketDemand::Low),
            _ => None,
        }
    }
}

/// A complete product state. The oracle requires every field; the graph-side
/// rules tolerate absence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductState {
    pub health: HealthRating,
    pub reference_service_life: i64,
    pub actual_service_life: i64,
    pub strategy_exists: bool,
    pub market_demand: MarketDemand,
    pub design_for_disassembly: bool,
}

/// Decide the route for a complete product state. Returns the at-EoL flag
/// and the route, which is present exactly when the product is at EoL.
pub fn oracle_decision(state: &ProductState) -> (bool, Option<EolRoute>) {
    let diff = state.reference_service_life - state.actual_service_life;
    let at_eol = diff <= 1;
    if !at_eol {
        return (false, None);
    }
    let route = match state.health {
        HealthRating::Green if state.actual_service_life < state.reference_service_life => {
            EolRoute::StrongReuseSuggestion
        }
        HealthRating::Green | HealthRating::Amber => {
            EolRoute::WeakReuseConsiderRefurbishmentSoon
        }
        HealthRating::Red => {
            if state.strategy_exists {
                EolRoute::FollowManufacturerEolStrategy
            } else if state.market_demand == MarketDemand::High
                || (state.market_demand == MarketDemand::Avg && state.design_for_disassembly)
            {
                EolRoute::RecycleDueToHighMarketDemand
            } else {
                EolRoute::SendToLandfill
            }
        }
    };
    (true, Some(route))
}
