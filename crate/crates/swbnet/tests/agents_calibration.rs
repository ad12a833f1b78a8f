//! Calibrated-policy behavior over whole sessions: logged tie decisions
//! must reproduce the table that generated them, and cooperation must be
//! independent of network position.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use swbnet::agents::{AgentPolicy, CalibrationTable};
use swbnet::engine::{run_session, Action, Condition, EventLog, SessionConfig};

fn run_batch(condition: Condition, sessions: u64) -> Vec<EventLog> {
    let policy = AgentPolicy::calibrated(CalibrationTable::default());
    (0..sessions)
        .map(|i| run_session(SessionConfig::new(condition, 9_000 + i), &policy).unwrap())
        .collect()
}

#[test]
fn logged_tie_decisions_match_the_table() {
    let table = CalibrationTable::default();
    for condition in Condition::BOTH {
        let logs = run_batch(condition, 60);
        let mut connects = [[0usize; 2]; 2];
        let mut totals = [[0usize; 2]; 2];
        for log in &logs {
            for row in log.tie_decision_rows() {
                let a = row.actor_action.index();
                let p = row.partner_action.index();
                totals[a][p] += 1;
                if row.connected {
                    connects[a][p] += 1;
                }
            }
        }
        for decider in [Action::Cooperate, Action::Defect] {
            for partner in [Action::Cooperate, Action::Defect] {
                let n = totals[decider.index()][partner.index()];
                assert!(
                    n >= 5_000,
                    "{condition} {decider}->{partner}: only {n} decisions"
                );
                let freq = connects[decider.index()][partner.index()] as f64 / n as f64;
                let p = table.connect_prob(condition, decider, partner);
                // 99.9% binomial band: this is a guard test, the exact
                // 95% criterion runs in the acceptance suite.
                let half_width = 3.29 * (p * (1.0 - p) / n as f64).sqrt();
                assert!(
                    (freq - p).abs() < half_width,
                    "{condition} {decider}->{partner}: {freq:.4} vs {p} (n={n})"
                );
            }
        }
    }
}

#[test]
fn cooperation_is_independent_of_degree() {
    // Chi-square test of homogeneity for C-rate across degree strata at
    // alpha = 0.01. Decisions in round r see the network of round r-1.
    let logs = run_batch(Condition::InvisibleSwb, 80);
    let n = 13usize;
    let mut coop_by_degree = vec![0usize; n];
    let mut total_by_degree = vec![0usize; n];
    for log in &logs {
        for round in 1..=log.config.rounds {
            let network = log
                .snapshot_for_round(round - 1)
                .unwrap()
                .to_network()
                .unwrap();
            let decisions = log.decisions_for_round(round);
            for (player, action) in decisions.iter().enumerate() {
                let d = network.degree(player).unwrap();
                total_by_degree[d] += 1;
                if *action == Action::Cooperate {
                    coop_by_degree[d] += 1;
                }
            }
        }
    }

    // Pool adjacent strata until each expects at least 30 decisions.
    let mut strata: Vec<(usize, usize)> = Vec::new();
    let mut pooled = (0usize, 0usize);
    for d in 0..n {
        pooled.0 += coop_by_degree[d];
        pooled.1 += total_by_degree[d];
        if pooled.1 >= 30 {
            strata.push(pooled);
            pooled = (0, 0);
        }
    }
    if pooled.1 > 0 {
        strata.push(pooled);
    }

    let grand_total: usize = strata.iter().map(|s| s.1).sum();
    let grand_coop: usize = strata.iter().map(|s| s.0).sum();
    let rate = grand_coop as f64 / grand_total as f64;
    let mut chi2 = 0.0;
    for &(coop, total) in &strata {
        let expected_c = rate * total as f64;
        let expected_d = (1.0 - rate) * total as f64;
        chi2 += (coop as f64 - expected_c).powi(2) / expected_c;
        chi2 += ((total - coop) as f64 - expected_d).powi(2) / expected_d;
    }
    let df = (strata.len() - 1) as f64;
    let critical = ChiSquared::new(df).unwrap().inverse_cdf(0.99);
    assert!(
        chi2 < critical,
        "chi2 {chi2:.2} (df {df}) exceeds {critical:.2}: cooperation depends on degree"
    );
}

#[test]
fn proposal_rows_come_in_pairs() {
    let logs = run_batch(Condition::VisibleSwb, 5);
    for log in &logs {
        let rows = log.tie_decision_rows();
        use swbnet::engine::TieRole;
        let proposals = rows
            .iter()
            .filter(|r| r.role == TieRole::Propose && r.connected)
            .count();
        let responses = rows.iter().filter(|r| r.role == TieRole::Respond).count();
        assert_eq!(
            proposals, responses,
            "every live proposal gets one response"
        );
    }
}
