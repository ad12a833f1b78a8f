//! Mediation analysis on per-network aggregates of an analyzed run.

use std::fmt::Write as _;
use std::path::Path;

use swbnet::engine::Condition;
use swbnet::seeds;
use swbnet::stats::{mediate, MediationResult};

use crate::analyze::{means_from_rows, read_trajectories, MEAN_COLUMNS};
use crate::report::fmt_sig10;
use crate::runner;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct MediationReport {
    pub mediator: String,
    pub outcome: String,
    pub dropped_networks: usize,
    pub result: MediationResult,
}

impl MediationReport {
    pub fn render(&self) -> String {
        let r = &self.result;
        let mut out = String::new();
        writeln!(out, "mediator = {}", self.mediator).unwrap();
        writeln!(out, "outcome = {}", self.outcome).unwrap();
        writeln!(out, "clusters = {}", r.clusters).unwrap();
        writeln!(out, "dropped_networks = {}", self.dropped_networks).unwrap();
        writeln!(out, "bootstrap = {}", r.bootstrap).unwrap();
        writeln!(out, "total_effect = {}", fmt_sig10(r.total_effect)).unwrap();
        writeln!(out, "direct_effect = {}", fmt_sig10(r.direct_effect)).unwrap();
        writeln!(out, "indirect_effect = {}", fmt_sig10(r.indirect_effect)).unwrap();
        writeln!(
            out,
            "proportion_mediated = {}",
            fmt_sig10(r.proportion_mediated)
        )
        .unwrap();
        writeln!(
            out,
            "indirect_ci = [{}, {}]",
            fmt_sig10(r.ci.0),
            fmt_sig10(r.ci.1)
        )
        .unwrap();
        writeln!(out, "indirect_p = {}", fmt_sig10(r.p_value)).unwrap();
        writeln!(out, "unstable_total = {}", r.unstable_total).unwrap();
        out
    }
}

/// Fits condition -> mediator -> outcome on per-network across-round
/// means (condition coded visible = 1, invisible = 0) with a cluster
/// bootstrap, and writes `reports/mediation_<mediator>__<outcome>.txt`.
pub fn mediate_run(
    run_dir: &Path,
    mediator: &str,
    outcome: &str,
    bootstrap: usize,
) -> Result<MediationReport, CliError> {
    if mediator == outcome {
        return Err(CliError::config(format!(
            "mediator and outcome are the same column ({mediator}); the fit would be degenerate"
        )));
    }
    for column in [mediator, outcome] {
        if !MEAN_COLUMNS.contains(&column) {
            return Err(CliError::config(format!(
                "unknown column {column:?}; available columns: {}",
                MEAN_COLUMNS.join(", ")
            )));
        }
    }

    let manifest = runner::read_manifest(run_dir)?;
    let rows = read_trajectories(run_dir)?;
    let means = means_from_rows(&rows);

    let mut x = Vec::new();
    let mut z = Vec::new();
    let mut y = Vec::new();
    let mut dropped = 0usize;
    for mean in &means {
        let m = mean.values.get(mediator).copied().flatten();
        let o = mean.values.get(outcome).copied().flatten();
        match (m, o) {
            (Some(m), Some(o)) => {
                x.push(if mean.condition == Condition::VisibleSwb {
                    1.0
                } else {
                    0.0
                });
                z.push(m);
                y.push(o);
            }
            _ => dropped += 1,
        }
    }

    let mut rng = seeds::derive_rng(
        manifest.config.master_seed,
        &format!("mediate:{mediator}:{outcome}"),
        0,
    );
    let result = mediate(&x, &z, &y, bootstrap, &mut rng)?;

    let report = MediationReport {
        mediator: mediator.to_string(),
        outcome: outcome.to_string(),
        dropped_networks: dropped,
        result,
    };
    let path = run_dir.join(format!("reports/mediation_{mediator}__{outcome}.txt"));
    std::fs::write(&path, report.render()).map_err(CliError::io(&path))?;
    Ok(report)
}
