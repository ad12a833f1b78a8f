//! The directional replication checklist over an analyzed run.

use std::fmt::Write as _;
use std::path::Path;

use swbnet::seeds;
use swbnet::stats::{permutation_test, ClusteredSample};

use crate::analyze::{condition_samples, means_from_rows, read_trajectories};
use crate::report::fmt_sig10;
use crate::runner;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationReport {
    pub findings: Vec<Finding>,
}

impl ReplicationReport {
    pub fn all_pass(&self) -> bool {
        self.findings.iter().all(|f| f.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            writeln!(
                out,
                "{} {}: {}",
                if f.pass { "PASS" } else { "FAIL" },
                f.name,
                f.detail
            )
            .unwrap();
        }
        writeln!(
            out,
            "verdict: {}",
            if self.all_pass() {
                "replicated"
            } else {
                "not replicated"
            }
        )
        .unwrap();
        out
    }
}

/// Evaluates the four structural findings on an analyzed run:
/// lower transitivity and more communities under visibility (both with
/// permutation p < 0.05), an attenuated cooperator-centrality gap, and a
/// lower cooperator-triangle fraction. Writes
/// `reports/replicate_report.txt`.
pub fn evaluate(run_dir: &Path) -> Result<ReplicationReport, CliError> {
    let manifest = runner::read_manifest(run_dir)?;
    let rows = read_trajectories(run_dir)?;
    let means = means_from_rows(&rows);
    let master = manifest.config.master_seed;

    let mut findings = Vec::new();
    let mut directional = |name: &'static str,
                           column: &str,
                           want_visible_lower: bool,
                           p_threshold: Option<f64>|
     -> Result<(), CliError> {
        let (visible, invisible) = condition_samples(&means, column);
        if visible.len() < 2 || invisible.len() < 2 {
            return Err(CliError::config(format!(
                "replication needs both conditions analyzed; {column} has {} visible and {} invisible networks",
                visible.len(),
                invisible.len()
            )));
        }
        let mv = visible.iter().sum::<f64>() / visible.len() as f64;
        let mi = invisible.iter().sum::<f64>() / invisible.len() as f64;
        let direction_ok = if want_visible_lower { mv < mi } else { mv > mi };

        let (pass, detail) = match p_threshold {
            Some(threshold) => {
                let mut rng = seeds::derive_rng(master, &format!("replicate-perm:{column}"), 0);
                let p = permutation_test(
                    &ClusteredSample::new("visible", visible),
                    &ClusteredSample::new("invisible", invisible),
                    10_000,
                    &mut rng,
                )?;
                (
                    direction_ok && p < threshold,
                    format!(
                        "visible {} vs invisible {} (diff {}, p {})",
                        fmt_sig10(mv),
                        fmt_sig10(mi),
                        fmt_sig10(mv - mi),
                        fmt_sig10(p)
                    ),
                )
            }
            None => (
                direction_ok,
                format!(
                    "visible {} vs invisible {} (diff {})",
                    fmt_sig10(mv),
                    fmt_sig10(mi),
                    fmt_sig10(mv - mi)
                ),
            ),
        };
        findings.push(Finding { name, pass, detail });
        Ok(())
    };

    directional(
        "transitivity lower under visibility",
        "transitivity",
        true,
        Some(0.05),
    )?;
    directional(
        "more communities under visibility",
        "communities",
        false,
        Some(0.05),
    )?;
    directional(
        "cooperator-centrality gap attenuated under visibility",
        "centrality_gap",
        true,
        None,
    )?;
    directional(
        "cooperator triangles rarer under visibility",
        "coop_triangle_fraction",
        true,
        None,
    )?;

    let report = ReplicationReport { findings };
    let path = run_dir.join("reports/replicate_report.txt");
    std::fs::write(&path, report.render()).map_err(CliError::io(&path))?;
    Ok(report)
}
