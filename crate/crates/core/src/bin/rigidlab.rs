use clap::{Parser, Subcommand};
use rigidity_lab::cli::{run_experiment, ExperimentConfig, ExperimentKind};
use rigidity_lab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Desk-scale rigidity experiments.
#[derive(Parser)]
#[command(name = "rigidlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Evaluate independent cells on all cores (same results).
        #[arg(long)]
        parallel: bool,
    },
    /// List experiments with their default configs.
    List,
    /// Check a config against the schema and runtime budgets.
    Validate { config: PathBuf },
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::BudgetExceeded(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for kind in ExperimentKind::ALL {
                let cfg = ExperimentConfig::default_for(kind);
                println!("{} [{}]", kind.name(), kind.checks().join(", "));
                println!("{}", serde_json::to_string(&cfg).expect("config serializes"));
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match ExperimentConfig::load(&config).and_then(|c| c.validate().map(|_| c)) {
            Ok(c) => {
                println!("ok: {}", c.experiment.name());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                exit_for(&e)
            }
        },
        Command::Run { config, parallel } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return exit_for(&e);
                }
            };
            cfg.parallel |= parallel;
            match run_experiment(&cfg) {
                Ok((report, dir)) => {
                    for c in &report.checks {
                        println!("{}", c.summary_line());
                    }
                    println!("wrote {} ({:.2}s)", dir.display(), report.wall_clock_s);
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("{e}");
                    exit_for(&e)
                }
            }
        }
    }
}
