//! The round state machine: initialization, network public-goods payoffs,
//! well-being ratings, tie rewiring with per-condition visibility, and
//! final payout, all recorded in a replayable event log.

mod config;
mod log;
mod session;
mod types;

pub use config::{Condition, SessionConfig};
pub use log::{Event, EventLog, TieDecisionRow, TieRole};
pub use session::{payout_usd, replay, run_session, ReplaySummary, Session};
pub use types::{
    Action, AgentBehavior, PairState, PeerView, Phase, Reputation, RewiringEvent, SwbEmoji,
    SwbRating, TieContext, TieDecision, TieStance,
};

use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid config field {field}: {message}")]
    InvalidConfig {
        field: &'static str,
        message: String,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("phase error in round {round}: expected {expected}, session is in {found}")]
    PhaseOrder {
        round: u32,
        expected: Phase,
        found: Phase,
    },
    #[error("protocol error: no decision for player {player}")]
    MissingDecision { player: usize },
    #[error("protocol error: got {got} decisions for {expected} players")]
    ExtraDecisions { expected: usize, got: usize },
    #[error("protocol error: no rating for player {player}")]
    MissingRating { player: usize },
    #[error("rating {value} for player {player} is outside -2..=2")]
    RatingOutOfRange { player: usize, value: i8 },
    #[error("player {player} out of range for a session of {n}")]
    PlayerOutOfRange { player: usize, n: usize },
    #[error("session is already complete")]
    SessionComplete,
    #[error("replay diverged in round {round}: {detail}")]
    ReplayDivergence { round: u32, detail: String },
}
