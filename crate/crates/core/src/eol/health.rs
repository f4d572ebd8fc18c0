//! Product health model: exponential decay and RICS condition ratings.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HealthError {
    #[error("initial health must be in (0, 1], got {0}")]
    InitialHealthOutOfRange(f64),
    #[error("decline rate must be >= 0 and finite, got {0}")]
    NegativeDeclineRate(f64),
    #[error("operating duration must be >= 0 and finite, got {0}")]
    NegativeDuration(f64),
    #[error("invalid thresholds: need 1 >= green-min > amber-min >= 0, got ({0}, {1})")]
    InvalidThresholds(f64, f64),
}

/// Parameters of the health decay model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HealthModelParams {
    /// Initial health, dimensionless in (0, 1].
    pub initial_health: f64,
    /// Decline rate per year, >= 0.
    pub decline_rate: f64,
    /// Operating duration in years, >= 0.
    pub operating_duration: f64,
}

impl HealthModelParams {
    pub fn new(
        initial_health: f64,
        decline_rate: f64,
        operating_duration: f64,
    ) -> Result<Self, HealthError> {
        if !(initial_health > 0.0 && initial_health <= 1.0) {
            return Err(HealthError::InitialHealthOutOfRange(initial_health));
        }
        if !(decline_rate >= 0.0 && decline_rate.is_finite()) {
            return Err(HealthError::NegativeDeclineRate(decline_rate));
        }
        if !(operating_duration >= 0.0 && operating_duration.is_finite()) {
            return Err(HealthError::NegativeDuration(operating_duration));
        }
        Ok(HealthModelParams {
            initial_health,
            decline_rate,
            operating_duration,
        })
    }
}

/// Current health: initial health decayed exponentially over the operating
/// duration, in double precision. Strictly decreasing in duration when the
/// decline rate is positive, constant when it is zero.
pub fn health_value(params: &HealthModelParams) -> f64 {
    params.initial_health * (-params.decline_rate * params.operating_duration).exp()
}

/// RICS condition rating: 1 (green) no repair needed, 2 (amber) repair or
/// replacement soon, 3 (red) serious defects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HealthRating {
    Green,
    Amber,
    Red,
}

impl HealthRating {
    pub fn condition_rating(&self) -> u8 {
        match self {
            HealthRating::Green => 1,
            HealthRating::Amber => 2,
            HealthRating::Red => 3,
        }
    }

    pub fn from_condition_rating(rating: u8) -> Option<Self> {
        match rating {
            1 => Some(HealthRating::Green),
            2 => Some(HealthRating::Amber),
            3 => Some(HealthRating::Red),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HealthRating::Green => "green",
            HealthRating::Amber => "amber",
            HealthRating::Red => "red",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "green" => Some(HealthRating::Green),
            "amber" => Some(HealthRating::Amber),
            "red" => Some(HealthRating::Red),
            _ => None,
        }
    }
}

/// Classification thresholds. The RICS scheme defines only qualitative
/// bands; the numeric cutoffs are deployment configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub green_min: f64,
    pub amber_min: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            green_min: 0.7,
            amber_min: 0.4,
        }
    }
}

impl Thresholds {
    pub fn new(green_min: f64, amber_min: f64) -> Result<Self, HealthError> {
        if !(green_min <= 1.0 && green_min > amber_min && amber_min >= 0.0) {
            return Err(HealthError::InvalidThresholds(green_min, amber_min));
        }
        Ok(Thresholds {
            green_min,
            amber_min,
        })
    }
}

/// Map a health value onto a rating; both boundaries are inclusive on the
/// better side.
pub fn classify_health(value: f64, thresholds: &Thresholds) -> HealthRating {
    if value >= thresholds.green_min {
        HealthRating::Green
    } else if value >= thresholds.amber_min {
        HealthRating::Amber
    } else {
        HealthRating::Red
    }
}
