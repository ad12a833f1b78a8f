//! Immutable protocol parameters of one session.

use std::fmt;
use std::str::FromStr;

use super::EngineError;

/// Whether connected peers' self-rated well-being is shown next to their
/// always-visible reputation and wealth. Fixed for a session's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    VisibleSwb,
    InvisibleSwb,
}

impl Condition {
    pub fn emoji_visible(self) -> bool {
        matches!(self, Condition::VisibleSwb)
    }

    /// Stable index for calibration tables: visible 0, invisible 1.
    pub fn index(self) -> usize {
        match self {
            Condition::VisibleSwb => 0,
            Condition::InvisibleSwb => 1,
        }
    }

    pub const BOTH: [Condition; 2] = [Condition::VisibleSwb, Condition::InvisibleSwb];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::VisibleSwb => "visible",
            Condition::InvisibleSwb => "invisible",
        })
    }
}

impl FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Condition, String> {
        match s {
            "visible" => Ok(Condition::VisibleSwb),
            "invisible" => Ok(Condition::InvisibleSwb),
            other => Err(format!("unknown condition {other:?} (visible|invisible)")),
        }
    }
}

/// Protocol parameters. Defaults follow the reference experiment: groups
/// of 13 playing 15 rounds on a 30%-density network, endowments of 1,150
/// (30% of players) or 200 (70%), cooperation at 50 points per connected
/// peer returning 100 to each, 30% per-pair rewiring chance, and a payout
/// rate of 2,000 points per USD.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub n_players: usize,
    pub rounds: u32,
    pub initial_density: f64,
    pub rich_wealth: i64,
    pub poor_wealth: i64,
    pub rich_fraction: f64,
    pub cooperation_cost_per_edge: i64,
    pub cooperation_benefit_per_edge: i64,
    pub rewiring_pair_probability: f64,
    pub points_per_usd: i64,
    pub condition: Condition,
    pub seed: u64,
}

impl SessionConfig {
    pub fn new(condition: Condition, seed: u64) -> SessionConfig {
        SessionConfig {
            n_players: 13,
            rounds: 15,
            initial_density: 0.3,
            rich_wealth: 1_150,
            poor_wealth: 200,
            rich_fraction: 0.3,
            cooperation_cost_per_edge: 50,
            cooperation_benefit_per_edge: 100,
            rewiring_pair_probability: 0.3,
            points_per_usd: 2_000,
            condition,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |field: &'static str, message: String| {
            Err(EngineError::InvalidConfig { field, message })
        };
        if self.n_players < 2 {
            return bad(
                "n_players",
                format!("need at least 2, got {}", self.n_players),
            );
        }
        if self.rounds < 1 {
            return bad("rounds", "need at least 1 round".into());
        }
        for (field, p) in [
            ("initial_density", self.initial_density),
            ("rich_fraction", self.rich_fraction),
            ("rewiring_pair_probability", self.rewiring_pair_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(field, format!("probability {p} outside [0, 1]"));
            }
        }
        for (field, v) in [
            ("rich_wealth", self.rich_wealth),
            ("poor_wealth", self.poor_wealth),
            ("cooperation_cost_per_edge", self.cooperation_cost_per_edge),
            (
                "cooperation_benefit_per_edge",
                self.cooperation_benefit_per_edge,
            ),
        ] {
            if v < 0 {
                return bad(field, format!("point value {v} must be >= 0"));
            }
        }
        if self.points_per_usd < 1 {
            return bad(
                "points_per_usd",
                format!("{} must be >= 1", self.points_per_usd),
            );
        }
        Ok(())
    }
}
