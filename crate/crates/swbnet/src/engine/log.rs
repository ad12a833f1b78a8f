//! Append-only record of everything that happened in a session.

use super::config::SessionConfig;
use super::types::{Action, RewiringEvent, SwbRating, TieDecision};
use crate::graph::EdgeSnapshot;

/// One phase record. Records are strictly ordered by round, then phase
/// (decision, payoff, rating, rewiring, snapshot), then player or pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Decision {
        round: u32,
        player: usize,
        action: Action,
    },
    Payoff {
        round: u32,
        player: usize,
        delta: i64,
        wealth_after: i64,
    },
    Swb {
        round: u32,
        player: usize,
        rating: SwbRating,
    },
    Rewiring(RewiringEvent),
    Snapshot(EdgeSnapshot),
    Payout {
        player: usize,
        points: i64,
        usd: f64,
    },
}

/// A complete session transcript: the config it ran under plus every
/// event in order, starting with the round-0 snapshot and ending with one
/// payout record per player.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub config: SessionConfig,
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn snapshots(&self) -> impl Iterator<Item = &EdgeSnapshot> {
        self.events.iter().filter_map(|e| match e {
            Event::Snapshot(s) => Some(s),
            _ => None,
        })
    }

    pub fn snapshot_for_round(&self, round: u32) -> Option<&EdgeSnapshot> {
        self.snapshots().find(|s| s.round == round)
    }

    pub fn rewirings(&self) -> impl Iterator<Item = &RewiringEvent> {
        self.events.iter().filter_map(|e| match e {
            Event::Rewiring(r) => Some(r),
            _ => None,
        })
    }

    pub fn decisions_for_round(&self, round: u32) -> Vec<Action> {
        let mut out = Vec::new();
        for e in &self.events {
            if let Event::Decision {
                round: r, action, ..
            } = e
            {
                if *r == round {
                    out.push(*action);
                }
            }
        }
        out
    }

    /// Final wealth per player, from the payout records.
    pub fn final_wealth(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.config.n_players];
        for e in &self.events {
            if let Event::Payout { player, points, .. } = e {
                out[*player] = *points;
            }
        }
        out
    }

    /// Unrolls every rewiring event into the individual tie decisions it
    /// records: one for keep/cut and no-tie, two for proposals (the
    /// proposal itself and the partner's response). Each row carries the
    /// acting player's own and partner current-round actions, which are
    /// the values that parameterized the draw.
    pub fn tie_decision_rows(&self) -> Vec<TieDecisionRow> {
        let mut rows = Vec::new();
        for ev in self.rewirings() {
            let partner = if ev.decider == ev.pair.0 {
                ev.pair.1
            } else {
                ev.pair.0
            };
            let first = |connected: bool, role: TieRole| TieDecisionRow {
                round: ev.round,
                actor: ev.decider,
                actor_action: ev.decider_action,
                partner_action: ev.partner_action,
                connected,
                role,
            };
            match ev.decision {
                TieDecision::Keep => rows.push(first(true, TieRole::Maintain)),
                TieDecision::Cut => rows.push(first(false, TieRole::Maintain)),
                TieDecision::NoTie => rows.push(first(false, TieRole::Propose)),
                TieDecision::ProposeAccept | TieDecision::ProposeReject => {
                    rows.push(first(true, TieRole::Propose));
                    rows.push(TieDecisionRow {
                        round: ev.round,
                        actor: partner,
                        actor_action: ev.partner_action,
                        partner_action: ev.decider_action,
                        connected: ev.decision == TieDecision::ProposeAccept,
                        role: TieRole::Respond,
                    });
                }
            }
        }
        rows
    }
}

/// Which step of the rewiring protocol a tie decision came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRole {
    Maintain,
    Propose,
    Respond,
}

/// One individual connect-or-not decision extracted from the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TieDecisionRow {
    pub round: u32,
    pub actor: usize,
    pub actor_action: Action,
    pub partner_action: Action,
    pub connected: bool,
    pub role: TieRole,
}
