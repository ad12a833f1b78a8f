use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swbnet::engine::Condition;
use swbnet_cli::config::RunConfig;
use swbnet_cli::{analyze, mediate, replicate, runner, CliError};

/// Batch runner for the dynamic-network public goods game experiment:
/// simulate replicated sessions, compute trajectory and summary reports,
/// check the directional replication findings, and run mediation
/// analyses.
#[derive(Parser)]
#[command(name = "swbnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated sessions and write event logs plus a manifest.
    Simulate {
        /// Flat key=value config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run directory to create.
        #[arg(long)]
        out: PathBuf,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Replicates per condition override.
        #[arg(long)]
        replicates: Option<usize>,
        /// Which condition(s) to simulate.
        #[arg(long, default_value = "both")]
        condition: String,
        /// Worker threads (0 = all cores). Output bytes never depend on it.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Compute per-round trajectories and the condition summary table.
    Analyze {
        run_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Evaluate the directional findings checklist on an analyzed run.
    Replicate { run_dir: PathBuf },
    /// Mediation analysis between two analyzed columns.
    Mediate {
        run_dir: PathBuf,
        /// Mediator column, e.g. coop_centrality.
        #[arg(long)]
        mediator: String,
        /// Outcome column, e.g. communities.
        #[arg(long)]
        outcome: String,
        /// Cluster bootstrap draws.
        #[arg(long, default_value_t = 2_000)]
        bootstrap: usize,
    },
}

fn parse_conditions(raw: &str) -> Result<Vec<Condition>, CliError> {
    match raw {
        "both" => Ok(Condition::BOTH.to_vec()),
        other => other
            .parse::<Condition>()
            .map(|c| vec![c])
            .map_err(CliError::Config),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            replicates,
            condition,
            jobs,
        } => {
            let mut run_config = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig::default(),
            };
            if let Some(seed) = seed {
                run_config.master_seed = seed;
            }
            if let Some(replicates) = replicates {
                run_config.replicates_per_condition = replicates;
            }
            let conditions = parse_conditions(&condition)?;
            let manifest = runner::simulate(&run_config, &conditions, &out, jobs)?;
            println!(
                "wrote {} logs under {} (master seed {})",
                manifest.logs.len(),
                out.display(),
                run_config.master_seed
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { run_dir, jobs } => {
            let analysis = analyze::analyze_run(&run_dir, jobs)?;
            println!(
                "analyzed {} networks x {} rounds -> {}",
                analysis.network_means.len(),
                analysis.rows.len() / analysis.network_means.len().max(1),
                run_dir.join("reports").display()
            );
            for row in &analysis.summary {
                println!(
                    "{:<24} visible {:>12} invisible {:>12} p {}",
                    row.outcome,
                    swbnet_cli::report::fmt_opt(row.visible_mean),
                    swbnet_cli::report::fmt_opt(row.invisible_mean),
                    swbnet_cli::report::fmt_opt(row.p_value),
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replicate { run_dir } => {
            let report = replicate::evaluate(&run_dir)?;
            print!("{}", report.render());
            if report.all_pass() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Mediate {
            run_dir,
            mediator,
            outcome,
            bootstrap,
        } => {
            let report = mediate::mediate_run(&run_dir, &mediator, &outcome, bootstrap)?;
            print!("{}", report.render());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
