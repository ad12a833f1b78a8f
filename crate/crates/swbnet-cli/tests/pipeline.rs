//! End-to-end behavior of the harness: degenerate agent runs, null and
//! swapped calibrations, byte-level determinism, and CLI exit codes.

use std::path::Path;
use std::process::Command;

use swbnet::agents::CalibrationTable;
use swbnet::engine::Condition;

use swbnet_cli::analyze::{analyze_run, condition_samples, means_from_rows, read_trajectories};
use swbnet_cli::config::{PolicyChoice, RunConfig};
use swbnet_cli::runner::simulate;
use swbnet_cli::{mediate, replicate};

fn quick_config(master_seed: u64, replicates: usize) -> RunConfig {
    RunConfig {
        master_seed,
        replicates_per_condition: replicates,
        ..RunConfig::default()
    }
}

#[test]
fn always_cooperate_run_has_unit_cooperation_rate() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        policy: PolicyChoice::AlwaysCooperate,
        rounds: 4,
        ..quick_config(3, 2)
    };
    simulate(&config, &Condition::BOTH, dir.path(), 1).unwrap();
    let analysis = analyze_run(dir.path(), 1).unwrap();
    assert!(analysis.rows.iter().all(|r| r.coop_rate == 1.0));
}

#[test]
fn zero_rewiring_keeps_degree_constant() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        rewiring_pair_probability: 0.0,
        rounds: 5,
        ..quick_config(4, 2)
    };
    simulate(&config, &Condition::BOTH, dir.path(), 1).unwrap();
    let analysis = analyze_run(dir.path(), 1).unwrap();
    for window in analysis.rows.windows(2) {
        if window[0].condition == window[1].condition && window[0].replicate == window[1].replicate
        {
            assert_eq!(window[0].mean_degree, window[1].mean_degree);
        }
    }
}

#[test]
fn null_calibration_fails_every_verdict() {
    // Both conditions run the same parameters: no effect exists by
    // construction, so no finding may pass (seeded run).
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        calibration: CalibrationTable::default().with_uniform_condition(Condition::InvisibleSwb),
        ..quick_config(13, 60)
    };
    simulate(&config, &Condition::BOTH, dir.path(), 1).unwrap();
    analyze_run(dir.path(), 1).unwrap();
    let report = replicate::evaluate(dir.path()).unwrap();
    assert!(
        report.findings.iter().all(|f| !f.pass),
        "null calibration produced a passing finding:\n{}",
        report.render()
    );
}

#[test]
fn swapped_calibration_inverts_every_direction() {
    let normal_dir = tempfile::tempdir().unwrap();
    let swapped_dir = tempfile::tempdir().unwrap();

    let normal = quick_config(12, 100);
    simulate(&normal, &Condition::BOTH, normal_dir.path(), 1).unwrap();
    analyze_run(normal_dir.path(), 1).unwrap();

    let swapped = RunConfig {
        calibration: CalibrationTable::default().with_conditions_swapped(),
        ..quick_config(12, 100)
    };
    simulate(&swapped, &Condition::BOTH, swapped_dir.path(), 1).unwrap();
    analyze_run(swapped_dir.path(), 1).unwrap();

    for column in [
        "transitivity",
        "communities",
        "coop_triangle_fraction",
        "centrality_gap",
    ] {
        let diff = |dir: &Path| {
            let means = means_from_rows(&read_trajectories(dir).unwrap());
            let (vis, inv) = condition_samples(&means, column);
            vis.iter().sum::<f64>() / vis.len() as f64 - inv.iter().sum::<f64>() / inv.len() as f64
        };
        let d_normal = diff(normal_dir.path());
        let d_swapped = diff(swapped_dir.path());
        assert!(
            d_normal * d_swapped < 0.0,
            "{column}: normal diff {d_normal}, swapped diff {d_swapped}"
        );
    }
}

#[test]
fn identical_runs_are_byte_identical_outside_the_manifest() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = quick_config(9, 4);
    simulate(&config, &Condition::BOTH, a.path(), 1).unwrap();
    simulate(&config, &Condition::BOTH, b.path(), 2).unwrap();
    analyze_run(a.path(), 1).unwrap();
    analyze_run(b.path(), 3).unwrap();

    for rel in [
        "logs/visible-0000.log",
        "logs/invisible-0003.log",
        "reports/trajectories.csv",
        "reports/summary.csv",
    ] {
        let left = std::fs::read(a.path().join(rel)).unwrap();
        let right = std::fs::read(b.path().join(rel)).unwrap();
        assert_eq!(left, right, "{rel} differs between identical runs");
    }

    // The manifest may differ only in its timestamp line.
    let strip = |path: &Path| {
        std::fs::read_to_string(path.join("manifest.txt"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("generated_at"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn default_replicates_mirror_the_experimental_design() {
    // 25 replicates per condition -> 50 networked groups.
    let dir = tempfile::tempdir().unwrap();
    let manifest = simulate(&RunConfig::default(), &Condition::BOTH, dir.path(), 1).unwrap();
    assert_eq!(manifest.config.replicates_per_condition, 25);
    assert_eq!(manifest.logs.len(), 50);

    let start = std::time::Instant::now();
    let analysis = analyze_run(dir.path(), 1).unwrap();
    assert!(
        start.elapsed().as_secs() < 60,
        "analyzing the 50-group design must stay under a minute"
    );
    assert_eq!(
        analysis.summary.len(),
        10,
        "summary carries all 10 outcome rows"
    );
    assert!(analysis.summary.iter().all(|r| r.p_value.is_some()));
}

#[test]
fn trajectory_csv_round_trips_through_the_reader() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        rounds: 6,
        ..quick_config(31, 5)
    };
    simulate(&config, &Condition::BOTH, dir.path(), 1).unwrap();
    let analysis = analyze_run(dir.path(), 1).unwrap();

    let reread = read_trajectories(dir.path()).unwrap();
    assert_eq!(reread.len(), analysis.rows.len());

    // Per-network means recomputed from the published CSV agree with the
    // in-memory analysis at CSV precision (10 significant digits).
    let means = means_from_rows(&reread);
    assert_eq!(means.len(), analysis.network_means.len());
    for from_csv in &means {
        let original = analysis
            .network_means
            .iter()
            .find(|m| m.condition == from_csv.condition && m.replicate == from_csv.replicate)
            .unwrap();
        for (column, value) in &from_csv.values {
            let want = original.values[column];
            match (value, want) {
                (Some(a), Some(b)) => {
                    assert!(
                        (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                        "{column}: {a} vs {b}"
                    )
                }
                (None, None) => {}
                other => panic!("{column}: presence mismatch {other:?}"),
            }
        }
    }
}

#[test]
fn constant_mediator_column_surfaces_the_stats_error() {
    // A complete network that never rewires keeps exactly one community,
    // making the mediator column constant.
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        initial_density: 1.0,
        rewiring_pair_probability: 0.0,
        rounds: 3,
        ..quick_config(6, 8)
    };
    simulate(&config, &Condition::BOTH, dir.path(), 1).unwrap();
    let analysis = analyze_run(dir.path(), 1).unwrap();
    assert!(analysis.rows.iter().all(|r| r.communities == 1));

    let err = mediate::mediate_run(dir.path(), "communities", "transitivity", 1_000)
        .unwrap_err()
        .to_string();
    assert!(
        err.contains("rank deficient") || err.contains("collinear"),
        "{err}"
    );
}

#[test]
fn mediate_rejects_bad_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(21, 12);
    simulate(&config, &Condition::BOTH, dir.path(), 1).unwrap();
    analyze_run(dir.path(), 1).unwrap();

    let err = mediate::mediate_run(dir.path(), "no_such_column", "communities", 1_000)
        .unwrap_err()
        .to_string();
    assert!(err.contains("available columns"), "{err}");
    assert!(err.contains("transitivity"), "{err}");

    let err = mediate::mediate_run(dir.path(), "communities", "communities", 1_000)
        .unwrap_err()
        .to_string();
    assert!(err.contains("degenerate"), "{err}");
}

// ------------------------------------------------------------ CLI binary

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swbnet"))
}

#[test]
fn cli_simulate_analyze_replicate_happy_path() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");

    let status = bin()
        .args(["simulate", "--out"])
        .arg(&run)
        .args(["--seed", "2024", "--replicates", "400"])
        .status()
        .unwrap();
    assert!(status.success());

    let status = bin().arg("analyze").arg(&run).status().unwrap();
    assert!(status.success());

    let output = bin().arg("replicate").arg(&run).output().unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        output.status.success(),
        "replicate failed:\n{stdout}{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert_eq!(stdout.matches("PASS").count(), 4, "{stdout}");
    assert!(run.join("reports/replicate_report.txt").is_file());
}

#[test]
fn cli_exit_codes_distinguish_error_classes() {
    let dir = tempfile::tempdir().unwrap();

    // Config error: unknown key -> exit 1.
    let bad_cfg = dir.path().join("bad.cfg");
    std::fs::write(&bad_cfg, "player_count = 13\n").unwrap();
    let output = bin()
        .args(["simulate", "--config"])
        .arg(&bad_cfg)
        .args(["--out"])
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    // Missing manifest -> I/O error, exit 3.
    let output = bin()
        .arg("analyze")
        .arg(dir.path().join("does-not-exist"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));

    // Corrupt log -> parse error, exit 1, with file/line context.
    let run = dir.path().join("run");
    let status = bin()
        .args(["simulate", "--out"])
        .arg(&run)
        .args(["--seed", "5", "--replicates", "1"])
        .status()
        .unwrap();
    assert!(status.success());
    let log = run.join("logs/visible-0000.log");
    let mut text = std::fs::read_to_string(&log).unwrap();
    text.push_str("DEC round=nope player=0 action=C\n");
    std::fs::write(&log, text).unwrap();
    let output = bin().arg("analyze").arg(&run).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("visible-0000.log"), "{stderr}");
    assert!(stderr.contains("round"), "{stderr}");

    // Failed replication verdict -> exit 2 (null calibration, seeded).
    let null_run = dir.path().join("null-run");
    let cfg_path = dir.path().join("null.cfg");
    let config = RunConfig {
        calibration: CalibrationTable::default().with_uniform_condition(Condition::InvisibleSwb),
        ..quick_config(13, 60)
    };
    std::fs::write(&cfg_path, config.to_flat_text()).unwrap();
    for args in [
        vec![
            "simulate",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            null_run.to_str().unwrap(),
        ],
        vec!["analyze", null_run.to_str().unwrap()],
    ] {
        assert!(bin().args(&args).status().unwrap().success());
    }
    let output = bin().arg("replicate").arg(&null_run).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn cli_single_condition_simulate_then_replicate_errors() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let status = bin()
        .args(["simulate", "--out"])
        .arg(&run)
        .args(["--seed", "8", "--replicates", "3", "--condition", "visible"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(bin().arg("analyze").arg(&run).status().unwrap().success());

    let output = bin().arg("replicate").arg(&run).output().unwrap();
    assert_eq!(
        output.status.code(),
        Some(1),
        "single-condition run cannot be replicated"
    );
    assert!(String::from_utf8_lossy(&output.stderr).contains("both conditions"));
}
