//! Batch simulation: one event-log file per (condition, replicate), plus
//! a manifest that makes the run self-describing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use swbnet::engine::{run_session, Condition};

use crate::config::RunConfig;
use crate::logfile;
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.txt";
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LogRef {
    pub condition: Condition,
    pub replicate: usize,
    pub path: PathBuf, // relative to the run directory
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub config: RunConfig,
    pub conditions: Vec<Condition>,
    pub logs: Vec<LogRef>,
}

/// Builds a rayon pool with `jobs` threads (0 = library default). All
/// parallel work is collected in deterministic order, so the jobs count
/// never changes any output byte.
pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}

/// Runs `replicates_per_condition` sessions for each requested condition
/// and writes the run directory. Fully deterministic from the config's
/// master seed; the only timestamp lives in the manifest.
pub fn simulate(
    config: &RunConfig,
    conditions: &[Condition],
    out_dir: &Path,
    jobs: usize,
) -> Result<Manifest, CliError> {
    if conditions.is_empty() {
        return Err(CliError::config("no condition selected"));
    }
    if config.replicates_per_condition < 1 {
        return Err(CliError::config("replicates_per_condition must be >= 1"));
    }

    let logs_dir = out_dir.join("logs");
    std::fs::create_dir_all(&logs_dir).map_err(CliError::io(&logs_dir))?;

    let mut cells: Vec<(Condition, usize)> = Vec::new();
    for &condition in conditions {
        for replicate in 0..config.replicates_per_condition {
            cells.push((condition, replicate));
        }
    }

    let policy = config.agent_policy();
    let pool = thread_pool(jobs)?;
    let rendered: Vec<(Condition, usize, String)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(condition, replicate)| {
                let session_cfg = config.session_config(condition, replicate);
                let log = run_session(session_cfg, &policy)?;
                Ok((condition, replicate, logfile::serialize(&log)))
            })
            .collect::<Result<_, CliError>>()
    })?;

    let mut logs = Vec::new();
    for (condition, replicate, text) in rendered {
        let rel = PathBuf::from(format!("logs/{condition}-{replicate:04}.log"));
        let path = out_dir.join(&rel);
        std::fs::write(&path, text).map_err(CliError::io(&path))?;
        logs.push(LogRef {
            condition,
            replicate,
            path: rel,
        });
    }

    let manifest = Manifest {
        config: config.clone(),
        conditions: conditions.to_vec(),
        logs,
    };
    write_manifest(&manifest, out_dir)?;
    Ok(manifest)
}

fn write_manifest(manifest: &Manifest, out_dir: &Path) -> Result<(), CliError> {
    let mut text = String::new();
    writeln!(text, "artifact_version = {ARTIFACT_VERSION}").unwrap();
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(text, "generated_at = {stamp}").unwrap();
    let names: Vec<String> = manifest.conditions.iter().map(|c| c.to_string()).collect();
    writeln!(text, "conditions = {}", names.join(",")).unwrap();
    for log in &manifest.logs {
        writeln!(
            text,
            "log = {} {} {}",
            log.condition,
            log.replicate,
            log.path.display()
        )
        .unwrap();
    }
    text.push_str(&manifest.config.to_flat_text());

    let path = out_dir.join(MANIFEST_NAME);
    std::fs::write(&path, text).map_err(CliError::io(&path))
}

pub fn read_manifest(run_dir: &Path) -> Result<Manifest, CliError> {
    let path = run_dir.join(MANIFEST_NAME);
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;

    let mut conditions = Vec::new();
    let mut logs = Vec::new();
    let mut config_lines = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let parse_err = |message: String| CliError::Parse {
            file: path.clone(),
            line: idx + 1,
            message,
            record: raw.to_string(),
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err("expected `key = value`".into()));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "artifact_version" => {
                let version: u32 = value
                    .parse()
                    .map_err(|e| parse_err(format!("bad artifact_version: {e}")))?;
                if version != ARTIFACT_VERSION {
                    return Err(parse_err(format!("unsupported artifact version {version}")));
                }
            }
            "generated_at" => {} // informational only
            "conditions" => {
                for name in value.split(',') {
                    conditions.push(name.trim().parse::<Condition>().map_err(parse_err)?);
                }
            }
            "log" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(parse_err(format!(
                        "expected `log = <condition> <replicate> <path>`, got {value:?}"
                    )));
                }
                logs.push(LogRef {
                    condition: parts[0].parse().map_err(parse_err)?,
                    replicate: parts[1]
                        .parse()
                        .map_err(|e| parse_err(format!("bad replicate: {e}")))?,
                    path: PathBuf::from(parts[2]),
                });
            }
            _ => {
                config_lines.push_str(raw);
                config_lines.push('\n');
            }
        }
    }

    if logs.is_empty() {
        return Err(CliError::config(format!(
            "manifest {} lists no logs",
            path.display()
        )));
    }
    let config = RunConfig::parse_flat(&config_lines, &path)?;
    Ok(Manifest {
        config,
        conditions,
        logs,
    })
}
