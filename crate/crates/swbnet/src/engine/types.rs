//! Domain types shared by the round phases and the agent interface.

use std::fmt;
use std::str::FromStr;

use super::Condition;
use crate::seeds::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Cooperate,
    Defect,
}

impl Action {
    /// Stable index for calibration tables: cooperate 0, defect 1.
    pub fn index(self) -> usize {
        match self {
            Action::Cooperate => 0,
            Action::Defect => 1,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Cooperate => "C",
            Action::Defect => "D",
        })
    }
}

impl FromStr for Action {
    type Err = String;
    fn from_str(s: &str) -> Result<Action, String> {
        match s {
            "C" => Ok(Action::Cooperate),
            "D" => Ok(Action::Defect),
            other => Err(format!("unknown action {other:?} (C|D)")),
        }
    }
}

/// A peer's displayed prior-round decision. `Unknown` only occurs before
/// the first payoff of a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reputation {
    Unknown,
    Known(Action),
}

/// The well-being emoji slot of a peer view. `Hidden` appears exactly in
/// invisible-condition sessions; `Unrated` is the visible-condition state
/// before the peer's first rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwbEmoji {
    Hidden,
    Unrated,
    Level(i8),
}

/// Answers to the two well-being questions, each on the five-option scale
/// converted to -2..=2. The second answer is what the emoji displays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwbRating {
    pub q1: i8,
    pub q2: i8,
}

/// What a player sees about one connected peer (or about the paired
/// candidate during rewiring): reputation and wealth always, the emoji
/// only in the visible condition.
#[derive(Debug, Clone, PartialEq)]
pub struct PeerView {
    pub peer: usize,
    pub reputation: Reputation,
    pub wealth: i64,
    pub swb_emoji: SwbEmoji,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairState {
    Connected,
    Unconnected,
}

impl fmt::Display for PairState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairState::Connected => "connected",
            PairState::Unconnected => "unconnected",
        })
    }
}

impl FromStr for PairState {
    type Err = String;
    fn from_str(s: &str) -> Result<PairState, String> {
        match s {
            "connected" => Ok(PairState::Connected),
            "unconnected" => Ok(PairState::Unconnected),
            other => Err(format!("unknown pair state {other:?}")),
        }
    }
}

/// Resolution of one selected pair: maintenance pairs resolve to keep or
/// cut, formation pairs to a proposal outcome or no proposal at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieDecision {
    Keep,
    Cut,
    ProposeAccept,
    ProposeReject,
    NoTie,
}

impl TieDecision {
    pub fn connects(self) -> bool {
        matches!(self, TieDecision::Keep | TieDecision::ProposeAccept)
    }
}

impl fmt::Display for TieDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieDecision::Keep => "keep",
            TieDecision::Cut => "cut",
            TieDecision::ProposeAccept => "propose_accept",
            TieDecision::ProposeReject => "propose_reject",
            TieDecision::NoTie => "no_tie",
        })
    }
}

impl FromStr for TieDecision {
    type Err = String;
    fn from_str(s: &str) -> Result<TieDecision, String> {
        match s {
            "keep" => Ok(TieDecision::Keep),
            "cut" => Ok(TieDecision::Cut),
            "propose_accept" => Ok(TieDecision::ProposeAccept),
            "propose_reject" => Ok(TieDecision::ProposeReject),
            "no_tie" => Ok(TieDecision::NoTie),
            other => Err(format!("unknown tie decision {other:?}")),
        }
    }
}

/// One selected pair's resolved outcome. `decider` made the first choice:
/// keep/cut on a connected pair, propose-or-not on an unconnected pair.
/// For proposals the partner's accept/reject is folded into `decision`.
/// The two action fields are the current-round decisions that drove the
/// draws, which is also how the homophily analysis classifies them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewiringEvent {
    pub round: u32,
    pub pair: (usize, usize),
    pub decider: usize,
    pub pre_state: PairState,
    pub decision: TieDecision,
    pub decider_action: Action,
    pub partner_action: Action,
}

/// What a tie decision amounts to from the acting player's side, before
/// the engine labels it: keep/propose/accept versus cut/pass/reject.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieStance {
    Connect,
    Withhold,
}

/// Everything an agent sees when resolving one side of a tie decision.
#[derive(Debug, Clone, PartialEq)]
pub struct TieContext {
    pub own_action: Action,
    pub partner_action: Action,
    pub partner: PeerView,
    pub pair_state: PairState,
}

/// Progress marker inside a round: decisions, then ratings, then
/// rewiring; `Complete` after the final round's rewiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    AwaitDecisions,
    AwaitRatings,
    AwaitRewiring,
    Complete,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::AwaitDecisions => "decision phase",
            Phase::AwaitRatings => "rating phase",
            Phase::AwaitRewiring => "rewiring phase",
            Phase::Complete => "complete",
        })
    }
}

/// Behavioral interface the session runner drives. Implementations must
/// draw from the supplied generator only, in call order, to keep sessions
/// deterministic.
pub trait AgentBehavior {
    fn decide_cooperation(
        &self,
        condition: Condition,
        view: &[PeerView],
        rng: &mut SeededRng,
    ) -> Action;

    fn decide_tie(&self, condition: Condition, ctx: &TieContext, rng: &mut SeededRng) -> TieStance;

    fn rate_swb(&self, wealth: &[i64], player: usize) -> SwbRating;
}
