//! Per-round trajectory metrics and the condition-contrast summary table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use swbnet::engine::{Condition, Event, EventLog};
use swbnet::metrics::{
    cooperator_triangle_fraction, eigenvector_centrality, gini, louvain, mean_centrality_by_action,
    transitivity,
};
use swbnet::seeds;
use swbnet::stats::{permutation_test, ClusteredSample};

use crate::config::RunConfig;
use crate::logfile;
use crate::report::{fmt_opt, fmt_sig10};
use crate::runner::{self, Manifest};
use crate::CliError;

/// Column order of `reports/trajectories.csv` (fixed; documented in the
/// event-log format notes).
pub const TRAJECTORY_HEADER: &str = "condition,replicate,round,coop_rate,mean_degree,mean_wealth,\
mean_q1,mean_q2,communities,transitivity,gini,coop_centrality,defector_centrality,\
coop_triangle_fraction";

/// Outcomes carried into `reports/summary.csv`, in row order: the six
/// trajectory outcomes plus centrality-by-action and cooperator
/// triangles.
pub const SUMMARY_OUTCOMES: [&str; 10] = [
    "coop_rate",
    "mean_degree",
    "mean_wealth",
    "mean_q1",
    "mean_q2",
    "communities",
    "transitivity",
    "coop_centrality",
    "defector_centrality",
    "coop_triangle_fraction",
];

/// Every column a network mean exists for (superset of the summary
/// outcomes; `centrality_gap` is the per-round cooperator-minus-defector
/// difference).
pub const MEAN_COLUMNS: [&str; 13] = [
    "coop_rate",
    "mean_degree",
    "mean_wealth",
    "mean_q1",
    "mean_q2",
    "communities",
    "transitivity",
    "gini",
    "coop_centrality",
    "defector_centrality",
    "coop_triangle_fraction",
    "centrality_gap",
    "final_wealth",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRow {
    pub condition: Condition,
    pub replicate: usize,
    pub round: u32,
    pub coop_rate: f64,
    pub mean_degree: f64,
    pub mean_wealth: f64,
    pub mean_q1: f64,
    pub mean_q2: f64,
    pub communities: usize,
    pub transitivity: f64,
    pub gini: f64,
    pub coop_centrality: Option<f64>,
    pub defector_centrality: Option<f64>,
    pub coop_triangle_fraction: f64,
}

/// Across-round means of one network, keyed by column name. Action-group
/// means average the rounds where the group existed and stay absent if it
/// never did.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMean {
    pub condition: Condition,
    pub replicate: usize,
    pub values: BTreeMap<&'static str, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub outcome: &'static str,
    pub visible_mean: Option<f64>,
    pub invisible_mean: Option<f64>,
    pub difference: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub master_seed: u64,
    pub rows: Vec<RoundRow>,
    pub network_means: Vec<NetworkMean>,
    pub summary: Vec<SummaryRow>,
}

/// Analyzes every log of a simulated run directory and writes
/// `reports/trajectories.csv`, `reports/summary.csv`, and
/// `reports/analysis.txt`. Louvain and permutation generator streams are
/// derived from the run's master seed, so results are independent of the
/// jobs count.
pub fn analyze_run(run_dir: &Path, jobs: usize) -> Result<Analysis, CliError> {
    let manifest = runner::read_manifest(run_dir)?;
    let analysis = analyze_manifest(run_dir, &manifest, jobs)?;
    write_reports(run_dir, &manifest.config, &analysis)?;
    Ok(analysis)
}

/// The in-memory computation behind [`analyze_run`].
pub fn analyze_manifest(
    run_dir: &Path,
    manifest: &Manifest,
    jobs: usize,
) -> Result<Analysis, CliError> {
    let master = manifest.config.master_seed;
    let pool = runner::thread_pool(jobs)?;
    let per_network: Vec<(Vec<RoundRow>, NetworkMean)> = pool.install(|| {
        manifest
            .logs
            .par_iter()
            .map(|log_ref| {
                let log = logfile::read_log(&run_dir.join(&log_ref.path))?;
                analyze_network(&log, log_ref.condition, log_ref.replicate, master)
            })
            .collect::<Result<_, CliError>>()
    })?;

    let mut rows = Vec::new();
    let mut network_means = Vec::new();
    for (network_rows, mean) in per_network {
        rows.extend(network_rows);
        network_means.push(mean);
    }

    let summary = summarize(&network_means, master)?;
    Ok(Analysis {
        master_seed: master,
        rows,
        network_means,
        summary,
    })
}

/// Per-round metrics for one network. Round r pairs the round's decisions
/// with the post-rewiring network of the same round, the state the round
/// left behind.
fn analyze_network(
    log: &EventLog,
    condition: Condition,
    replicate: usize,
    master_seed: u64,
) -> Result<(Vec<RoundRow>, NetworkMean), CliError> {
    let n = log.config.n_players;
    let context = |round: u32, what: &str, detail: String| {
        CliError::config(format!(
            "analysis of {condition}-{replicate:04} round {round}: {what}: {detail}"
        ))
    };

    let mut rows = Vec::new();
    for round in 1..=log.config.rounds {
        let decisions = log.decisions_for_round(round);
        if decisions.len() != n {
            return Err(context(
                round,
                "decisions",
                format!("{} of {} present", decisions.len(), n),
            ));
        }
        let snapshot = log
            .snapshot_for_round(round)
            .ok_or_else(|| context(round, "snapshot", "missing".into()))?;
        let network = snapshot
            .to_network()
            .map_err(|e| context(round, "snapshot", e.to_string()))?;

        let mut wealth = vec![0i64; n];
        let mut q1 = vec![0f64; n];
        let mut q2 = vec![0f64; n];
        for event in &log.events {
            match event {
                Event::Payoff {
                    round: r,
                    player,
                    wealth_after,
                    ..
                } if *r == round => wealth[*player] = *wealth_after,
                Event::Swb {
                    round: r,
                    player,
                    rating,
                } if *r == round => {
                    q1[*player] = rating.q1 as f64;
                    q2[*player] = rating.q2 as f64;
                }
                _ => {}
            }
        }

        let coop_rate = decisions
            .iter()
            .filter(|a| **a == swbnet::engine::Action::Cooperate)
            .count() as f64
            / n as f64;
        let mean_degree = 2.0 * network.edge_count() as f64 / n as f64;
        let mean_wealth = wealth.iter().sum::<i64>() as f64 / n as f64;

        // Wealth can run negative mid-game; the inequality column floors
        // at zero, mirroring the payout rule.
        let clamped: Vec<f64> = wealth.iter().map(|&w| w.max(0) as f64).collect();
        let gini_value = gini(&clamped).map_err(|e| context(round, "gini", e.to_string()))?;

        let mut louvain_rng = seeds::derive_rng(
            master_seed,
            &format!("louvain:{condition}:{replicate}"),
            round as u64,
        );
        let partition = louvain(&network, &mut louvain_rng);

        let cv = eigenvector_centrality(&network);
        let (coop_centrality, defector_centrality) = mean_centrality_by_action(&cv, &decisions);
        let triangle = cooperator_triangle_fraction(&network, &decisions)
            .map_err(|e| context(round, "triangles", e.to_string()))?;

        rows.push(RoundRow {
            condition,
            replicate,
            round,
            coop_rate,
            mean_degree,
            mean_wealth,
            mean_q1: q1.iter().sum::<f64>() / n as f64,
            mean_q2: q2.iter().sum::<f64>() / n as f64,
            communities: partition.count(),
            transitivity: transitivity(&network),
            gini: gini_value,
            coop_centrality,
            defector_centrality,
            coop_triangle_fraction: triangle,
        });
    }

    let final_wealth = log.final_wealth();
    let mean = network_mean(condition, replicate, &rows, &final_wealth);
    Ok((rows, mean))
}

fn network_mean(
    condition: Condition,
    replicate: usize,
    rows: &[RoundRow],
    final_wealth: &[i64],
) -> NetworkMean {
    fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
        let collected: Vec<f64> = values.collect();
        if collected.is_empty() {
            None
        } else {
            Some(collected.iter().sum::<f64>() / collected.len() as f64)
        }
    }

    let mut values: BTreeMap<&'static str, Option<f64>> = BTreeMap::new();
    values.insert("coop_rate", mean_of(rows.iter().map(|r| r.coop_rate)));
    values.insert("mean_degree", mean_of(rows.iter().map(|r| r.mean_degree)));
    values.insert("mean_wealth", mean_of(rows.iter().map(|r| r.mean_wealth)));
    values.insert("mean_q1", mean_of(rows.iter().map(|r| r.mean_q1)));
    values.insert("mean_q2", mean_of(rows.iter().map(|r| r.mean_q2)));
    values.insert(
        "communities",
        mean_of(rows.iter().map(|r| r.communities as f64)),
    );
    values.insert("transitivity", mean_of(rows.iter().map(|r| r.transitivity)));
    values.insert("gini", mean_of(rows.iter().map(|r| r.gini)));
    values.insert(
        "coop_centrality",
        mean_of(rows.iter().filter_map(|r| r.coop_centrality)),
    );
    values.insert(
        "defector_centrality",
        mean_of(rows.iter().filter_map(|r| r.defector_centrality)),
    );
    values.insert(
        "coop_triangle_fraction",
        mean_of(rows.iter().map(|r| r.coop_triangle_fraction)),
    );
    values.insert(
        "centrality_gap",
        mean_of(
            rows.iter()
                .filter_map(|r| match (r.coop_centrality, r.defector_centrality) {
                    (Some(c), Some(d)) => Some(c - d),
                    _ => None,
                }),
        ),
    );
    values.insert(
        "final_wealth",
        mean_of(std::iter::once(
            final_wealth.iter().sum::<i64>() as f64 / final_wealth.len().max(1) as f64,
        )),
    );

    NetworkMean {
        condition,
        replicate,
        values,
    }
}

/// Condition samples for one column: (visible, invisible), networks with
/// an absent value dropped.
pub fn condition_samples(network_means: &[NetworkMean], column: &str) -> (Vec<f64>, Vec<f64>) {
    let mut visible = Vec::new();
    let mut invisible = Vec::new();
    for mean in network_means {
        if let Some(Some(v)) = mean.values.get(column) {
            match mean.condition {
                Condition::VisibleSwb => visible.push(*v),
                Condition::InvisibleSwb => invisible.push(*v),
            }
        }
    }
    (visible, invisible)
}

fn summarize(network_means: &[NetworkMean], master_seed: u64) -> Result<Vec<SummaryRow>, CliError> {
    let mut summary = Vec::new();
    for outcome in SUMMARY_OUTCOMES {
        let (visible, invisible) = condition_samples(network_means, outcome);
        let visible_mean = mean_opt(&visible);
        let invisible_mean = mean_opt(&invisible);
        let difference = match (visible_mean, invisible_mean) {
            (Some(v), Some(i)) => Some(v - i),
            _ => None,
        };
        let p_value = if visible.len() >= 2 && invisible.len() >= 2 {
            let mut rng = seeds::derive_rng(master_seed, &format!("perm:{outcome}"), 0);
            Some(permutation_test(
                &ClusteredSample::new("visible", visible),
                &ClusteredSample::new("invisible", invisible),
                10_000,
                &mut rng,
            )?)
        } else {
            None
        };
        summary.push(SummaryRow {
            outcome,
            visible_mean,
            invisible_mean,
            difference,
            p_value,
        });
    }
    Ok(summary)
}

fn mean_opt(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn trajectories_csv(rows: &[RoundRow]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.condition,
            r.replicate,
            r.round,
            fmt_sig10(r.coop_rate),
            fmt_sig10(r.mean_degree),
            fmt_sig10(r.mean_wealth),
            fmt_sig10(r.mean_q1),
            fmt_sig10(r.mean_q2),
            r.communities,
            fmt_sig10(r.transitivity),
            fmt_sig10(r.gini),
            fmt_opt(r.coop_centrality),
            fmt_opt(r.defector_centrality),
            fmt_sig10(r.coop_triangle_fraction),
        )
        .unwrap();
    }
    out
}

pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from("outcome,visible_mean,invisible_mean,difference,p_value\n");
    for row in summary {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.outcome,
            fmt_opt(row.visible_mean),
            fmt_opt(row.invisible_mean),
            fmt_opt(row.difference),
            fmt_opt(row.p_value),
        )
        .unwrap();
    }
    out
}

fn write_reports(run_dir: &Path, config: &RunConfig, analysis: &Analysis) -> Result<(), CliError> {
    let reports = run_dir.join("reports");
    std::fs::create_dir_all(&reports).map_err(CliError::io(&reports))?;

    let trajectories = reports.join("trajectories.csv");
    std::fs::write(&trajectories, trajectories_csv(&analysis.rows))
        .map_err(CliError::io(&trajectories))?;

    let summary = reports.join("summary.csv");
    std::fs::write(&summary, summary_csv(&analysis.summary)).map_err(CliError::io(&summary))?;

    // Seed provenance: everything below is derivable from the master
    // seed, recorded so a reader can reproduce any single number.
    let mut notes = String::new();
    writeln!(notes, "master_seed = {}", config.master_seed).unwrap();
    writeln!(notes, "networks = {}", analysis.network_means.len()).unwrap();
    writeln!(notes, "rounds_per_network = {}", config.rounds).unwrap();
    writeln!(
        notes,
        "louvain_seed_rule = derive(master_seed, \"louvain:<condition>:<replicate>\", round)"
    )
    .unwrap();
    writeln!(
        notes,
        "permutation_seed_rule = derive(master_seed, \"perm:<outcome>\", 0), 10000 iterations"
    )
    .unwrap();
    let path = reports.join("analysis.txt");
    std::fs::write(&path, notes).map_err(CliError::io(&path))?;
    Ok(())
}

/// Reads `reports/trajectories.csv` back into rows (the inverse of
/// [`trajectories_csv`]); downstream commands work from the published
/// artifact rather than recomputing it.
pub fn read_trajectories(run_dir: &Path) -> Result<Vec<RoundRow>, CliError> {
    let path = run_dir.join("reports/trajectories.csv");
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != TRAJECTORY_HEADER {
                return Err(CliError::Parse {
                    file: path.clone(),
                    line: 1,
                    message: "unexpected trajectory header".into(),
                    record: line.to_string(),
                });
            }
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        let parse_err = |message: String| CliError::Parse {
            file: path.clone(),
            line: idx + 1,
            message,
            record: line.to_string(),
        };
        if parts.len() != 14 {
            return Err(parse_err(format!(
                "expected 14 columns, got {}",
                parts.len()
            )));
        }
        fn req<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            s.parse().map_err(|e| format!("bad {what}: {e}"))
        }
        fn opt(s: &str, what: &str) -> Result<Option<f64>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                req(s, what).map(Some)
            }
        }
        rows.push(RoundRow {
            condition: req(parts[0], "condition").map_err(&parse_err)?,
            replicate: req(parts[1], "replicate").map_err(&parse_err)?,
            round: req(parts[2], "round").map_err(&parse_err)?,
            coop_rate: req(parts[3], "coop_rate").map_err(&parse_err)?,
            mean_degree: req(parts[4], "mean_degree").map_err(&parse_err)?,
            mean_wealth: req(parts[5], "mean_wealth").map_err(&parse_err)?,
            mean_q1: req(parts[6], "mean_q1").map_err(&parse_err)?,
            mean_q2: req(parts[7], "mean_q2").map_err(&parse_err)?,
            communities: req(parts[8], "communities").map_err(&parse_err)?,
            transitivity: req(parts[9], "transitivity").map_err(&parse_err)?,
            gini: req(parts[10], "gini").map_err(&parse_err)?,
            coop_centrality: opt(parts[11], "coop_centrality").map_err(&parse_err)?,
            defector_centrality: opt(parts[12], "defector_centrality").map_err(&parse_err)?,
            coop_triangle_fraction: req(parts[13], "coop_triangle_fraction").map_err(&parse_err)?,
        });
    }
    Ok(rows)
}

/// Rebuilds per-network means from trajectory rows (used by commands that
/// start from the CSV artifact). `final_wealth` is unavailable in the CSV
/// and therefore absent here.
pub fn means_from_rows(rows: &[RoundRow]) -> Vec<NetworkMean> {
    let mut grouped: BTreeMap<(String, usize), Vec<&RoundRow>> = BTreeMap::new();
    for row in rows {
        grouped
            .entry((row.condition.to_string(), row.replicate))
            .or_default()
            .push(row);
    }
    grouped
        .into_values()
        .map(|group| {
            let owned: Vec<RoundRow> = group.into_iter().cloned().collect();
            let mut mean = network_mean(owned[0].condition, owned[0].replicate, &owned, &[]);
            mean.values.remove("final_wealth");
            mean
        })
        .collect()
}
