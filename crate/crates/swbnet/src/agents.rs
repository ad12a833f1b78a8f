//! Behavioral policies calibrated from the measured decision frequencies.
//!
//! The calibrated policy cooperates at the per-condition base rate and
//! resolves tie decisions from an eight-cell connect-probability table
//! indexed by condition, own current action, and partner current action.
//! One table governs maintenance (keep vs. cut), proposals, and
//! acceptances alike. Policies never condition on the visible emoji; the
//! condition effect enters only through the table. Custom
//! [`AgentBehavior`] implementations may read `PeerView::swb_emoji` if an
//! emoji-sensitive variant is ever wanted.

use rand::Rng;
use thiserror::Error;

use crate::engine::{
    Action, AgentBehavior, Condition, PairState, PeerView, Reputation, SwbRating, TieContext,
    TieStance,
};
use crate::seeds::SeededRng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("probability {value} for {name} is outside [0, 1]")]
    ProbabilityOutOfRange { name: String, value: f64 },
    #[error("well-being mapping must be monotone non-decreasing, got {0:?}")]
    NonMonotoneMapping([i8; 5]),
    #[error("well-being level {0} is outside -2..=2")]
    LevelOutOfRange(i8),
}

/// The measured behavioral parameterization: eight tie-connect
/// probabilities plus two cooperation base rates.
///
/// `Default` carries the published point estimates. Under the invisible
/// condition cooperators connect with cooperators at 86.1% and defectors
/// at 29.5%, defectors with defectors at 60.5% and cooperators at 72.1%,
/// cooperating at 53.3% overall. Under the visible condition the
/// homophilic cells drop (82.0%, 56.4%) and the heterophilic cells rise
/// (30.3%, 78.2%), with a 49.3% cooperation rate.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    // [condition][decider action][partner action]
    connect_prob: [[[f64; 2]; 2]; 2],
    coop_rate: [f64; 2],
}

impl Default for CalibrationTable {
    fn default() -> CalibrationTable {
        let mut connect_prob = [[[0.0; 2]; 2]; 2];
        let vis = Condition::VisibleSwb.index();
        let inv = Condition::InvisibleSwb.index();
        let c = Action::Cooperate.index();
        let d = Action::Defect.index();

        connect_prob[inv][c][c] = 0.861;
        connect_prob[inv][c][d] = 0.295;
        connect_prob[inv][d][d] = 0.605;
        connect_prob[inv][d][c] = 0.721;

        connect_prob[vis][c][c] = 0.820;
        connect_prob[vis][c][d] = 0.303;
        connect_prob[vis][d][d] = 0.564;
        connect_prob[vis][d][c] = 0.782;

        let mut coop_rate = [0.0; 2];
        coop_rate[vis] = 0.493;
        coop_rate[inv] = 0.533;

        CalibrationTable {
            connect_prob,
            coop_rate,
        }
    }
}

impl CalibrationTable {
    pub fn connect_prob(&self, condition: Condition, decider: Action, partner: Action) -> f64 {
        self.connect_prob[condition.index()][decider.index()][partner.index()]
    }

    pub fn coop_rate(&self, condition: Condition) -> f64 {
        self.coop_rate[condition.index()]
    }

    pub fn set_connect_prob(
        &mut self,
        condition: Condition,
        decider: Action,
        partner: Action,
        value: f64,
    ) -> Result<(), AgentError> {
        check_probability(
            &format!("connect_prob[{condition}][{decider}][{partner}]"),
            value,
        )?;
        self.connect_prob[condition.index()][decider.index()][partner.index()] = value;
        Ok(())
    }

    pub fn set_coop_rate(&mut self, condition: Condition, value: f64) -> Result<(), AgentError> {
        check_probability(&format!("coop_rate[{condition}]"), value)?;
        self.coop_rate[condition.index()] = value;
        Ok(())
    }

    /// Copies one condition's parameters over the other, producing a null
    /// calibration with no condition effect.
    pub fn with_uniform_condition(mut self, source: Condition) -> CalibrationTable {
        let s = source.index();
        let t = 1 - s;
        self.connect_prob[t] = self.connect_prob[s];
        self.coop_rate[t] = self.coop_rate[s];
        self
    }

    /// Swaps the two conditions' parameters.
    pub fn with_conditions_swapped(mut self) -> CalibrationTable {
        self.connect_prob.swap(0, 1);
        self.coop_rate.swap(0, 1);
        self
    }
}

fn check_probability(name: &str, value: f64) -> Result<(), AgentError> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(AgentError::ProbabilityOutOfRange {
            name: name.to_string(),
            value,
        });
    }
    Ok(())
}

/// Wealth-quintile to rating mapping, monotone non-decreasing. The
/// default (0, 1, 1, 1, 2) gives a population mean of 1 under uniform
/// quintile occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwbMapping([i8; 5]);

impl Default for SwbMapping {
    fn default() -> SwbMapping {
        SwbMapping([0, 1, 1, 1, 2])
    }
}

impl SwbMapping {
    pub fn new(levels: [i8; 5]) -> Result<SwbMapping, AgentError> {
        for level in levels {
            if !(-2..=2).contains(&level) {
                return Err(AgentError::LevelOutOfRange(level));
            }
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(AgentError::NonMonotoneMapping(levels));
        }
        Ok(SwbMapping(levels))
    }

    pub fn levels(&self) -> [i8; 5] {
        self.0
    }

    pub fn level_for_quintile(&self, quintile: usize) -> i8 {
        self.0[quintile]
    }
}

/// Which rule produces cooperation decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    /// Cooperate at the condition's calibrated base rate, independent of
    /// the network.
    Calibrated,
    /// Cooperate with probability `clamp(alpha + beta * f, 0, 1)` where
    /// `f` is the fraction of visible peers whose reputation is C.
    ConditionalCooperator {
        alpha: f64,
        beta: f64,
    },
    AlwaysCooperate,
    AlwaysDefect,
}

/// A complete agent: cooperation rule, tie table, and well-being mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentPolicy {
    pub kind: PolicyKind,
    pub table: CalibrationTable,
    pub swb_mapping: SwbMapping,
}

impl AgentPolicy {
    pub fn calibrated(table: CalibrationTable) -> AgentPolicy {
        AgentPolicy {
            kind: PolicyKind::Calibrated,
            table,
            swb_mapping: SwbMapping::default(),
        }
    }

    pub fn always_cooperate() -> AgentPolicy {
        AgentPolicy {
            kind: PolicyKind::AlwaysCooperate,
            ..AgentPolicy::calibrated(CalibrationTable::default())
        }
    }

    pub fn always_defect() -> AgentPolicy {
        AgentPolicy {
            kind: PolicyKind::AlwaysDefect,
            ..AgentPolicy::calibrated(CalibrationTable::default())
        }
    }

    pub fn conditional(alpha: f64, beta: f64) -> AgentPolicy {
        AgentPolicy {
            kind: PolicyKind::ConditionalCooperator { alpha, beta },
            ..AgentPolicy::calibrated(CalibrationTable::default())
        }
    }

    /// Cooperation decision for one player given their current peer views.
    pub fn decide_cooperation(
        &self,
        condition: Condition,
        view: &[PeerView],
        rng: &mut SeededRng,
    ) -> Action {
        let p = match self.kind {
            PolicyKind::Calibrated => self.table.coop_rate(condition),
            PolicyKind::AlwaysCooperate => return Action::Cooperate,
            PolicyKind::AlwaysDefect => return Action::Defect,
            PolicyKind::ConditionalCooperator { alpha, beta } => {
                let known: Vec<Action> = view
                    .iter()
                    .filter_map(|pv| match pv.reputation {
                        Reputation::Known(a) => Some(a),
                        Reputation::Unknown => None,
                    })
                    .collect();
                let fraction = if known.is_empty() {
                    0.0
                } else {
                    known.iter().filter(|a| **a == Action::Cooperate).count() as f64
                        / known.len() as f64
                };
                (alpha + beta * fraction).clamp(0.0, 1.0)
            }
        };
        if rng.random_bool(p) {
            Action::Cooperate
        } else {
            Action::Defect
        }
    }

    /// Tie decision from the acting player's side. The same table entry
    /// governs keep, propose, and accept; `pre_state` is available to
    /// custom policies but ignored by the calibrated one.
    pub fn decide_tie(
        &self,
        condition: Condition,
        own_action: Action,
        partner_action: Action,
        _pre_state: PairState,
        rng: &mut SeededRng,
    ) -> TieStance {
        let p = self
            .table
            .connect_prob(condition, own_action, partner_action);
        if rng.random_bool(p) {
            TieStance::Connect
        } else {
            TieStance::Withhold
        }
    }

    /// Resolves a displayed reputation into an action for the tie table.
    /// An unknown reputation (round 1) is imputed as C with the
    /// condition's base cooperation rate.
    pub fn impute_action(
        &self,
        condition: Condition,
        reputation: Reputation,
        rng: &mut SeededRng,
    ) -> Action {
        match reputation {
            Reputation::Known(action) => action,
            Reputation::Unknown => {
                if rng.random_bool(self.table.coop_rate(condition)) {
                    Action::Cooperate
                } else {
                    Action::Defect
                }
            }
        }
    }

    /// Both well-being answers from the player's wealth quintile within
    /// the current population; ties share the quintile of their lowest
    /// rank, so equal wealth always yields equal ratings.
    pub fn rate_swb(&self, wealth: &[i64], player: usize) -> SwbRating {
        let rank = wealth.iter().filter(|&&w| w < wealth[player]).count();
        let quintile = rank * 5 / wealth.len();
        let level = self.swb_mapping.level_for_quintile(quintile);
        SwbRating {
            q1: level,
            q2: level,
        }
    }
}

impl AgentBehavior for AgentPolicy {
    fn decide_cooperation(
        &self,
        condition: Condition,
        view: &[PeerView],
        rng: &mut SeededRng,
    ) -> Action {
        AgentPolicy::decide_cooperation(self, condition, view, rng)
    }

    fn decide_tie(&self, condition: Condition, ctx: &TieContext, rng: &mut SeededRng) -> TieStance {
        AgentPolicy::decide_tie(
            self,
            condition,
            ctx.own_action,
            ctx.partner_action,
            ctx.pair_state,
            rng,
        )
    }

    fn rate_swb(&self, wealth: &[i64], player: usize) -> SwbRating {
        AgentPolicy::rate_swb(self, wealth, player)
    }
}
