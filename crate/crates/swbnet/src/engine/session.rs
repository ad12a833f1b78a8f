//! Session lifecycle: init, the three in-round phases, payout, and replay.

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::SessionConfig;
use super::log::{Event, EventLog};
use super::types::{
    Action, AgentBehavior, PairState, PeerView, Phase, Reputation, RewiringEvent, SwbEmoji,
    SwbRating, TieContext, TieDecision, TieStance,
};
use super::EngineError;
use crate::graph::Network;
use crate::seeds::{self, SeededRng};

/// A running session: immutable config plus the mutable per-round state
/// and the growing event log. All mutation goes through the phase
/// methods, which enforce the decide -> payoff -> rate -> rewire order.
#[derive(Debug, Clone)]
pub struct Session {
    config: SessionConfig,
    round: u32,
    phase: Phase,
    network: Network,
    wealth: Vec<i64>,
    last_action: Vec<Option<Action>>,
    last_swb: Vec<Option<SwbRating>>,
    rng: SeededRng,
    events: Vec<Event>,
}

impl Session {
    /// Draws the initial network at the configured density and assigns
    /// endowments: exactly `round(rich_fraction * n)` players, chosen
    /// uniformly, start rich. The exact count pins the initial Gini at
    /// its design target for every draw.
    pub fn init(config: SessionConfig) -> Result<Session, EngineError> {
        config.validate()?;
        let n = config.n_players;
        let mut rng = seeds::rng_from_seed(config.seed);
        let network = Network::random(n, config.initial_density, &mut rng)?;

        let rich_count = (config.rich_fraction * n as f64).round() as usize;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut wealth = vec![config.poor_wealth; n];
        for &player in order.iter().take(rich_count) {
            wealth[player] = config.rich_wealth;
        }

        let events = vec![Event::Snapshot(network.snapshot(0))];
        Ok(Session {
            config,
            round: 0,
            phase: Phase::AwaitDecisions,
            network,
            wealth,
            last_action: vec![None; n],
            last_swb: vec![None; n],
            rng,
            events,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn wealth(&self) -> &[i64] {
        &self.wealth
    }

    pub fn is_complete(&self) -> bool {
        self.phase == Phase::Complete
    }

    pub fn into_log(self) -> EventLog {
        EventLog {
            config: self.config,
            events: self.events,
        }
    }

    /// What `viewer` currently sees about each connected peer.
    pub fn visibility_view(&self, viewer: usize) -> Result<Vec<PeerView>, EngineError> {
        let n = self.config.n_players;
        if viewer >= n {
            return Err(EngineError::PlayerOutOfRange { player: viewer, n });
        }
        Ok(self
            .network
            .neighbors(viewer)?
            .iter()
            .map(|&peer| self.peer_view(peer))
            .collect())
    }

    fn peer_view(&self, peer: usize) -> PeerView {
        let reputation = match self.last_action[peer] {
            Some(action) => Reputation::Known(action),
            None => Reputation::Unknown,
        };
        let swb_emoji = if self.config.condition.emoji_visible() {
            match self.last_swb[peer] {
                Some(rating) => SwbEmoji::Level(rating.q2),
                None => SwbEmoji::Unrated,
            }
        } else {
            SwbEmoji::Hidden
        };
        PeerView {
            peer,
            reputation,
            wealth: self.wealth[peer],
            swb_emoji,
        }
    }

    /// Applies one round of simultaneous public-goods decisions: a
    /// cooperator pays `cost * degree` and every player receives
    /// `benefit` per cooperating neighbor. Returns the per-player wealth
    /// deltas and advances the session to the rating phase.
    pub fn apply_pgg_round(&mut self, decisions: &[Action]) -> Result<Vec<i64>, EngineError> {
        self.expect_phase(Phase::AwaitDecisions)?;
        let n = self.config.n_players;
        if decisions.len() < n {
            return Err(EngineError::MissingDecision {
                player: decisions.len(),
            });
        }
        if decisions.len() > n {
            return Err(EngineError::ExtraDecisions {
                expected: n,
                got: decisions.len(),
            });
        }

        self.round += 1;
        let round = self.round;
        for (player, &action) in decisions.iter().enumerate() {
            self.events.push(Event::Decision {
                round,
                player,
                action,
            });
        }

        let cost = self.config.cooperation_cost_per_edge;
        let benefit = self.config.cooperation_benefit_per_edge;
        let mut deltas = vec![0i64; n];
        for u in 0..n {
            let neighbors = self.network.neighbors(u)?;
            let cooperating = neighbors
                .iter()
                .filter(|&&v| decisions[v] == Action::Cooperate)
                .count() as i64;
            let mut delta = benefit * cooperating;
            if decisions[u] == Action::Cooperate {
                delta -= cost * neighbors.len() as i64;
            }
            deltas[u] = delta;
        }
        for (player, &delta) in deltas.iter().enumerate() {
            self.wealth[player] += delta;
            self.events.push(Event::Payoff {
                round,
                player,
                delta,
                wealth_after: self.wealth[player],
            });
        }
        self.last_action = decisions.iter().map(|&a| Some(a)).collect();
        self.phase = Phase::AwaitRatings;
        Ok(deltas)
    }

    /// Records the two well-being answers of every player, each required
    /// to lie in -2..=2, and advances to the rewiring phase.
    pub fn apply_swb_phase(&mut self, ratings: &[SwbRating]) -> Result<(), EngineError> {
        self.expect_phase(Phase::AwaitRatings)?;
        let n = self.config.n_players;
        if ratings.len() != n {
            return Err(EngineError::MissingRating {
                player: ratings.len().min(n),
            });
        }
        for (player, rating) in ratings.iter().enumerate() {
            for value in [rating.q1, rating.q2] {
                if !(-2..=2).contains(&value) {
                    return Err(EngineError::RatingOutOfRange { player, value });
                }
            }
        }
        for (player, &rating) in ratings.iter().enumerate() {
            self.last_swb[player] = Some(rating);
            self.events.push(Event::Swb {
                round: self.round,
                player,
                rating,
            });
        }
        self.phase = Phase::AwaitRewiring;
        Ok(())
    }

    /// Runs the stochastic rewiring phase. Every unordered pair is
    /// independently selected with the configured probability; a selected
    /// connected pair gets a unilateral keep/cut decision by one member
    /// chosen at random, a selected unconnected pair gets a propose step
    /// and, if proposed, an accept/reject step by the other member.
    ///
    /// Draw order is fixed: pairs in lexicographic order, and per pair
    /// the selection draw, the decider draw, then the stance draw(s).
    pub fn rewiring_phase<A: AgentBehavior>(
        &mut self,
        agent: &A,
    ) -> Result<Vec<RewiringEvent>, EngineError> {
        self.expect_phase(Phase::AwaitRewiring)?;
        let n = self.config.n_players;
        let p_select = self.config.rewiring_pair_probability;
        let condition = self.config.condition;
        let round = self.round;

        let mut events = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if !self.rng.random_bool(p_select) {
                    continue;
                }
                let decider_is_u = self.rng.random_bool(0.5);
                let (decider, partner) = if decider_is_u { (u, v) } else { (v, u) };
                // Actions were applied this round, so both are known.
                let decider_action = self.last_action[decider].unwrap();
                let partner_action = self.last_action[partner].unwrap();
                let connected = self.network.has_edge(u, v);
                let pre_state = if connected {
                    PairState::Connected
                } else {
                    PairState::Unconnected
                };

                let ctx = TieContext {
                    own_action: decider_action,
                    partner_action,
                    partner: self.peer_view(partner),
                    pair_state: pre_state,
                };
                let stance = agent.decide_tie(condition, &ctx, &mut self.rng);

                let decision = match (connected, stance) {
                    (true, TieStance::Connect) => TieDecision::Keep,
                    (true, TieStance::Withhold) => TieDecision::Cut,
                    (false, TieStance::Withhold) => TieDecision::NoTie,
                    (false, TieStance::Connect) => {
                        // Formation is bilateral: the partner decides
                        // whether to accept the proposal.
                        let response_ctx = TieContext {
                            own_action: partner_action,
                            partner_action: decider_action,
                            partner: self.peer_view(decider),
                            pair_state: PairState::Unconnected,
                        };
                        match agent.decide_tie(condition, &response_ctx, &mut self.rng) {
                            TieStance::Connect => TieDecision::ProposeAccept,
                            TieStance::Withhold => TieDecision::ProposeReject,
                        }
                    }
                };

                match decision {
                    TieDecision::Keep | TieDecision::ProposeAccept => {
                        self.network.add_edge(u, v)?;
                    }
                    TieDecision::Cut => {
                        self.network.remove_edge(u, v)?;
                    }
                    TieDecision::ProposeReject | TieDecision::NoTie => {}
                }

                events.push(RewiringEvent {
                    round,
                    pair: (u, v),
                    decider,
                    pre_state,
                    decision,
                    decider_action,
                    partner_action,
                });
            }
        }

        self.finish_rewiring(events.clone());
        Ok(events)
    }

    // Shared tail of live and replayed rewiring: log the events, snapshot
    // the round, and either open the next round or close the session with
    // payout records.
    fn finish_rewiring(&mut self, events: Vec<RewiringEvent>) {
        for ev in events {
            self.events.push(Event::Rewiring(ev));
        }
        self.events
            .push(Event::Snapshot(self.network.snapshot(self.round)));
        if self.round >= self.config.rounds {
            self.phase = Phase::Complete;
            for player in 0..self.config.n_players {
                let points = self.wealth[player];
                self.events.push(Event::Payout {
                    player,
                    points,
                    usd: payout_usd(points, self.config.points_per_usd),
                });
            }
        } else {
            self.phase = Phase::AwaitDecisions;
        }
    }

    /// Applies rewiring decisions taken from a log instead of an agent,
    /// verifying that each event's pre-state matches this session.
    pub fn apply_logged_rewiring(&mut self, events: &[RewiringEvent]) -> Result<(), EngineError> {
        self.expect_phase(Phase::AwaitRewiring)?;
        for ev in events {
            let (u, v) = ev.pair;
            let connected = self.network.has_edge(u, v);
            let expected = if connected {
                PairState::Connected
            } else {
                PairState::Unconnected
            };
            if ev.round != self.round || ev.pre_state != expected {
                return Err(EngineError::ReplayDivergence {
                    round: self.round,
                    detail: format!("rewiring event {ev:?} does not match pair state {expected}"),
                });
            }
            match ev.decision {
                TieDecision::Keep | TieDecision::ProposeAccept => {
                    self.network.add_edge(u, v)?;
                }
                TieDecision::Cut => {
                    self.network.remove_edge(u, v)?;
                }
                TieDecision::ProposeReject | TieDecision::NoTie => {}
            }
        }
        self.finish_rewiring(events.to_vec());
        Ok(())
    }

    fn expect_phase(&self, expected: Phase) -> Result<(), EngineError> {
        if self.phase == Phase::Complete {
            return Err(EngineError::SessionComplete);
        }
        if self.phase != expected {
            return Err(EngineError::PhaseOrder {
                round: self.round,
                expected,
                found: self.phase,
            });
        }
        Ok(())
    }
}

/// Converts final points to a USD amount, floored at zero for players who
/// ended in debt.
pub fn payout_usd(points: i64, points_per_usd: i64) -> f64 {
    points.max(0) as f64 / points_per_usd as f64
}

/// Runs a full session: for each round, simultaneous cooperation
/// decisions over current peer views, payoffs, well-being ratings, and
/// rewiring; ends with payout records. Identical config and seed produce
/// identical logs.
pub fn run_session<A: AgentBehavior>(
    config: SessionConfig,
    agent: &A,
) -> Result<EventLog, EngineError> {
    let condition = config.condition;
    let n = config.n_players;
    let mut session = Session::init(config)?;

    while !session.is_complete() {
        // Views are fixed before any decision so that the phase is
        // simultaneous; draws then run in player-index order.
        let views: Vec<Vec<PeerView>> = (0..n)
            .map(|u| session.visibility_view(u))
            .collect::<Result<_, _>>()?;
        let decisions: Vec<Action> = views
            .iter()
            .map(|view| agent.decide_cooperation(condition, view, &mut session.rng))
            .collect();
        session.apply_pgg_round(&decisions)?;

        let ratings: Vec<SwbRating> = (0..n)
            .map(|player| agent.rate_swb(&session.wealth, player))
            .collect();
        session.apply_swb_phase(&ratings)?;

        session.rewiring_phase(agent)?;
    }
    Ok(session.into_log())
}

/// Final state reconstructed from a log.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplaySummary {
    pub final_wealth: Vec<i64>,
    pub network: Network,
}

/// Re-executes a log's decisions through the engine and verifies every
/// intermediate record against the freshly computed state. Initialization
/// is deterministic in the config seed, so the reconstruction is exact.
pub fn replay(log: &EventLog) -> Result<ReplaySummary, EngineError> {
    let mut session = Session::init(log.config.clone())?;
    let n = log.config.n_players;

    let diverged = |round: u32, detail: String| EngineError::ReplayDivergence { round, detail };

    let initial = log
        .snapshot_for_round(0)
        .ok_or_else(|| diverged(0, "log has no round-0 snapshot".into()))?;
    if initial.to_network()? != session.network {
        return Err(diverged(0, "initial network differs".into()));
    }

    for round in 1..=log.config.rounds {
        let decisions = log.decisions_for_round(round);
        if decisions.len() != n {
            return Err(diverged(
                round,
                format!("{} decisions for {} players", decisions.len(), n),
            ));
        }
        session.apply_pgg_round(&decisions)?;

        for event in &log.events {
            if let Event::Payoff {
                round: r,
                player,
                wealth_after,
                ..
            } = event
            {
                if *r == round && session.wealth[*player] != *wealth_after {
                    return Err(diverged(
                        round,
                        format!(
                            "player {player} wealth {} vs logged {wealth_after}",
                            session.wealth[*player]
                        ),
                    ));
                }
            }
        }

        let mut ratings = vec![None; n];
        for event in &log.events {
            if let Event::Swb {
                round: r,
                player,
                rating,
            } = event
            {
                if *r == round {
                    ratings[*player] = Some(*rating);
                }
            }
        }
        let ratings: Vec<SwbRating> = ratings
            .into_iter()
            .enumerate()
            .map(|(player, r)| r.ok_or(EngineError::MissingRating { player }))
            .collect::<Result<_, _>>()?;
        session.apply_swb_phase(&ratings)?;

        let rewirings: Vec<RewiringEvent> = log
            .rewirings()
            .filter(|ev| ev.round == round)
            .cloned()
            .collect();
        session.apply_logged_rewiring(&rewirings)?;

        let snapshot = log
            .snapshot_for_round(round)
            .ok_or_else(|| diverged(round, "missing snapshot".into()))?;
        if snapshot.to_network()? != session.network {
            return Err(diverged(round, "network snapshot differs".into()));
        }
    }

    let logged_final = log.final_wealth();
    if logged_final != session.wealth {
        return Err(diverged(
            log.config.rounds,
            "payout records differ from replayed wealth".into(),
        ));
    }
    Ok(ReplaySummary {
        final_wealth: session.wealth.clone(),
        network: session.network.clone(),
    })
}
