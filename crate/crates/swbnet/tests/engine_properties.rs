//! Engine invariants: payoff identity, phase/replay determinism,
//! visibility discipline, rewiring-event distribution.

use std::cell::RefCell;

use proptest::prelude::*;
use rand::Rng;

use swbnet::agents::{AgentPolicy, CalibrationTable};
use swbnet::engine::{
    replay, run_session, Action, AgentBehavior, Condition, Event, PeerView, Session, SessionConfig,
    SwbEmoji, SwbRating, TieContext, TieDecision, TieStance,
};
use swbnet::graph::Network;
use swbnet::seeds::{self, SeededRng};

fn small_config(condition: Condition, seed: u64, n: usize, rounds: u32) -> SessionConfig {
    let mut cfg = SessionConfig::new(condition, seed);
    cfg.n_players = n;
    cfg.rounds = rounds;
    cfg
}

proptest! {
    #[test]
    fn degree_sum_is_twice_edge_count(ops in prop::collection::vec((0usize..8, 0usize..8, prop::bool::ANY), 0..60)) {
        let mut g = Network::empty(8);
        for (u, v, add) in ops {
            if u == v {
                continue;
            }
            if add {
                g.add_edge(u, v).unwrap();
            } else {
                g.remove_edge(u, v).unwrap();
            }
            let degree_sum: usize = (0..8).map(|x| g.degree(x).unwrap()).sum();
            prop_assert_eq!(degree_sum, 2 * g.edge_count());
        }
    }

    #[test]
    fn sessions_replay_and_repeat_exactly(
        seed in 0u64..5_000,
        n in 2usize..8,
        rounds in 1u32..5,
        visible in prop::bool::ANY,
    ) {
        let condition = if visible { Condition::VisibleSwb } else { Condition::InvisibleSwb };
        let cfg = small_config(condition, seed, n, rounds);
        let policy = AgentPolicy::calibrated(CalibrationTable::default());

        let log = run_session(cfg.clone(), &policy).unwrap();
        let again = run_session(cfg, &policy).unwrap();
        prop_assert_eq!(&log, &again, "same config+seed must give identical logs");

        let summary = replay(&log).unwrap();
        prop_assert_eq!(summary.final_wealth, log.final_wealth());
    }
}

#[test]
fn wealth_identity_over_random_states() {
    // Sum of deltas == (benefit - cost) * sum of cooperator degrees,
    // exactly, in integer arithmetic, for arbitrary point values.
    let mut rng = seeds::derive_rng(2024, "wealth-identity", 0);
    for _ in 0..500 {
        let n = rng.random_range(2..=13);
        let mut cfg = SessionConfig::new(Condition::InvisibleSwb, rng.random());
        cfg.n_players = n;
        cfg.initial_density = rng.random_range(0.0..=1.0);
        cfg.cooperation_cost_per_edge = rng.random_range(0..=200);
        cfg.cooperation_benefit_per_edge = rng.random_range(0..=300);
        let cost = cfg.cooperation_cost_per_edge;
        let benefit = cfg.cooperation_benefit_per_edge;

        let mut session = Session::init(cfg).unwrap();
        let decisions: Vec<Action> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Action::Cooperate
                } else {
                    Action::Defect
                }
            })
            .collect();
        let cooperator_degree: i64 = (0..n)
            .filter(|&u| decisions[u] == Action::Cooperate)
            .map(|u| session.network().degree(u).unwrap() as i64)
            .sum();
        let deltas = session.apply_pgg_round(&decisions).unwrap();
        assert_eq!(
            deltas.iter().sum::<i64>(),
            (benefit - cost) * cooperator_degree
        );
    }
}

/// Policy wrapper that records every emoji slot it is shown.
struct EmojiSpy {
    inner: AgentPolicy,
    seen: RefCell<Vec<SwbEmoji>>,
}

impl EmojiSpy {
    fn new() -> EmojiSpy {
        EmojiSpy {
            inner: AgentPolicy::calibrated(CalibrationTable::default()),
            seen: RefCell::new(Vec::new()),
        }
    }
}

impl AgentBehavior for EmojiSpy {
    fn decide_cooperation(
        &self,
        condition: Condition,
        view: &[PeerView],
        rng: &mut SeededRng,
    ) -> Action {
        self.seen
            .borrow_mut()
            .extend(view.iter().map(|pv| pv.swb_emoji));
        self.inner.decide_cooperation(condition, view, rng)
    }

    fn decide_tie(&self, condition: Condition, ctx: &TieContext, rng: &mut SeededRng) -> TieStance {
        self.seen.borrow_mut().push(ctx.partner.swb_emoji);
        AgentBehavior::decide_tie(&self.inner, condition, ctx, rng)
    }

    fn rate_swb(&self, wealth: &[i64], player: usize) -> SwbRating {
        self.inner.rate_swb(wealth, player)
    }
}

#[test]
fn invisible_sessions_never_show_an_emoji() {
    for seed in 0..20 {
        let spy = EmojiSpy::new();
        let cfg = small_config(Condition::InvisibleSwb, seed, 8, 6);
        run_session(cfg, &spy).unwrap();
        let seen = spy.seen.borrow();
        assert!(!seen.is_empty());
        assert!(
            seen.iter().all(|e| *e == SwbEmoji::Hidden),
            "seed {seed}: non-hidden emoji leaked into an invisible session"
        );
    }
}

#[test]
fn visible_sessions_show_the_second_answer() {
    // After round 1 every peer has rated, so views during the cooperation
    // phase of later rounds must carry concrete levels; round-1 views are
    // Unrated, never Hidden.
    for seed in 0..20 {
        let spy = EmojiSpy::new();
        let cfg = small_config(Condition::VisibleSwb, seed, 8, 6);
        run_session(cfg, &spy).unwrap();
        let seen = spy.seen.borrow();
        assert!(seen.iter().all(|e| *e != SwbEmoji::Hidden), "seed {seed}");
        assert!(
            seen.iter().any(|e| matches!(e, SwbEmoji::Level(_))),
            "seed {seed}: no concrete emoji level ever shown"
        );
    }
}

#[test]
fn visibility_view_carries_q2() {
    let cfg = small_config(Condition::VisibleSwb, 3, 2, 2);
    let mut session = Session::init(cfg).unwrap();
    session
        .apply_pgg_round(&[Action::Cooperate, Action::Defect])
        .unwrap();
    session
        .apply_swb_phase(&[SwbRating { q1: -1, q2: 2 }, SwbRating { q1: 0, q2: -2 }])
        .unwrap();
    if session.network().has_edge(0, 1) {
        let view = session.visibility_view(0).unwrap();
        assert_eq!(view[0].swb_emoji, SwbEmoji::Level(-2));
        let view = session.visibility_view(1).unwrap();
        assert_eq!(view[0].swb_emoji, SwbEmoji::Level(2));
    }
    assert!(session.visibility_view(7).is_err());
}

#[test]
fn rewiring_probability_extremes() {
    let policy = AgentPolicy::calibrated(CalibrationTable::default());

    let mut cfg = small_config(Condition::InvisibleSwb, 5, 3, 4);
    cfg.rewiring_pair_probability = 0.0;
    let log = run_session(cfg, &policy).unwrap();
    assert_eq!(log.rewirings().count(), 0);
    let first = log.snapshot_for_round(0).unwrap();
    let last = log.snapshot_for_round(4).unwrap();
    assert_eq!(
        first.edges, last.edges,
        "no rewiring may change the network"
    );

    let mut cfg = small_config(Condition::InvisibleSwb, 6, 3, 4);
    cfg.rewiring_pair_probability = 1.0;
    let log = run_session(cfg, &policy).unwrap();
    for round in 1..=4 {
        let per_round = log.rewirings().filter(|ev| ev.round == round).count();
        assert_eq!(per_round, 3, "all C(3,2) pairs must be selected");
    }
}

#[test]
fn rewiring_selection_is_binomial_on_average() {
    // Defaults: 78 pairs at 0.3 -> mean 23.4 selected per round.
    let policy = AgentPolicy::calibrated(CalibrationTable::default());
    let mut rounds_total = 0usize;
    let mut events_total = 0usize;
    for seed in 0..200 {
        let cfg = SessionConfig::new(Condition::InvisibleSwb, seed);
        let log = run_session(cfg, &policy).unwrap();
        rounds_total += 15;
        events_total += log.rewirings().count();
    }
    let mean = events_total as f64 / rounds_total as f64;
    let se = (78.0 * 0.3 * 0.7f64).sqrt() / (rounds_total as f64).sqrt();
    assert!(
        (mean - 23.4).abs() < 3.0 * se,
        "mean selected pairs {mean}, se {se}"
    );
}

#[test]
fn rewiring_decisions_are_consistent_with_pre_state() {
    let policy = AgentPolicy::calibrated(CalibrationTable::default());
    for seed in 100..120 {
        let cfg = SessionConfig::new(Condition::VisibleSwb, seed);
        let log = run_session(cfg, &policy).unwrap();
        for ev in log.rewirings() {
            use swbnet::engine::PairState;
            match ev.decision {
                TieDecision::Keep | TieDecision::Cut => {
                    assert_eq!(ev.pre_state, PairState::Connected)
                }
                TieDecision::ProposeAccept | TieDecision::ProposeReject | TieDecision::NoTie => {
                    assert_eq!(ev.pre_state, PairState::Unconnected)
                }
            }
            assert!(ev.decider == ev.pair.0 || ev.decider == ev.pair.1);
        }
    }
}

#[test]
fn event_log_is_strictly_phase_ordered() {
    let policy = AgentPolicy::calibrated(CalibrationTable::default());
    let log = run_session(SessionConfig::new(Condition::VisibleSwb, 77), &policy).unwrap();

    // Rank events as (round, phase, index); payouts sort after everything.
    fn rank(event: &Event) -> (u32, u8, usize) {
        match event {
            Event::Snapshot(s) if s.round == 0 => (0, 0, 0),
            Event::Decision { round, player, .. } => (*round, 1, *player),
            Event::Payoff { round, player, .. } => (*round, 2, *player),
            Event::Swb { round, player, .. } => (*round, 3, *player),
            Event::Rewiring(ev) => (ev.round, 4, ev.pair.0 * 1_000 + ev.pair.1),
            Event::Snapshot(s) => (s.round, 5, 0),
            Event::Payout { player, .. } => (u32::MAX, 6, *player),
        }
    }
    let ranks: Vec<_> = log.events.iter().map(rank).collect();
    let mut sorted = ranks.clone();
    sorted.sort();
    assert_eq!(
        ranks, sorted,
        "event log must be ordered by round/phase/index"
    );
}

#[test]
fn initial_wealth_uses_exact_rich_count() {
    for seed in 0..50 {
        let cfg = SessionConfig::new(Condition::InvisibleSwb, seed);
        let session = Session::init(cfg).unwrap();
        let rich = session.wealth().iter().filter(|&&w| w == 1_150).count();
        assert_eq!(rich, 4, "round(0.3 * 13) = 4 rich players");
        assert_eq!(session.wealth().len(), 13);
    }

    let mut cfg = SessionConfig::new(Condition::InvisibleSwb, 1);
    cfg.rich_fraction = 1.0;
    let session = Session::init(cfg).unwrap();
    assert!(session.wealth().iter().all(|&w| w == 1_150));
}
