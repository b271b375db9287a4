use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scbandit::experiment::{
    draw_instance, emit_results, run_experiment, ExperimentConfig, RunOptions, Truth,
};
use scbandit::oracle::DEFAULT_MAX_N;
use scbandit::{enumerate_optimal, expected_payoff, optimal_sequence, EnvironmentParams, Error};

/// Sequential choice bandit experiments.
#[derive(Debug, Parser)]
#[command(name = "scbandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write records.csv, aggregate.csv and manifest.toml.
    Run {
        /// Experiment config, or a manifest from an earlier run.
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of replications.
        #[arg(long)]
        reps: Option<u64>,
        /// Override the horizon.
        #[arg(long)]
        horizon: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        parallelism: Option<usize>,
        /// Save finished runs here and resume from them.
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
    },
    /// Check a config file and exit.
    Validate { config: PathBuf },
    /// Print the optimal sequence of the first replication's instance, and
    /// the brute-force optimum when the catalog is small enough.
    Oracle { config: PathBuf },
}

fn exit_code(err: &Error) -> ExitCode {
    if err.is_config_error() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            reps,
            horizon,
            parallelism,
            checkpoint_dir,
        } => {
            let mut config = ExperimentConfig::from_path(&config)?;
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(r) = reps {
                config.replications = r;
            }
            if let Some(t) = horizon {
                config.horizon = t;
            }
            config.validate()?;
            let options = RunOptions {
                parallelism,
                checkpoint_dir,
            };
            let dataset = run_experiment(&config, &options)?;
            let files = emit_results(&dataset, &out)?;
            for spec in &config.policies {
                let label = spec.label();
                println!(
                    "{label}: mean cumulative regret {:.4} at t = {}",
                    dataset.mean_final_regret(label),
                    config.horizon
                );
            }
            println!("wrote {}", files.records.display());
            println!("wrote {}", files.aggregate.display());
            println!("wrote {}", files.manifest.display());
        }
        Command::Validate { config } => {
            let config = ExperimentConfig::from_path(&config)?;
            println!(
                "ok: {} messages, {} policies, horizon {}, {} replications",
                config.catalog.messages,
                config.policies.len(),
                config.horizon,
                config.replications
            );
        }
        Command::Oracle { config } => {
            let config = ExperimentConfig::from_path(&config)?;
            let instance = draw_instance(&config, 0)?;
            let env: EnvironmentParams = match &instance.truth {
                Truth::Plain(env) => env.clone(),
                Truth::Contextual(ctx) => {
                    // A user at the center of the feature box.
                    let mut x = vec![1.0];
                    x.extend(
                        ctx.features()
                            .ranges()
                            .iter()
                            .map(|(lo, hi)| 0.5 * (lo + hi)),
                    );
                    println!("contextual config: user at features {x:?}");
                    ctx.params_at(&x)?
                }
            };
            let catalog = &instance.catalog;
            let best = optimal_sequence(catalog, &env)?;
            let value = expected_payoff(catalog, &env, &best)?.expected_payoff;
            println!("score order:  {best}  expected payoff {value:.12}");
            if catalog.len() <= DEFAULT_MAX_N {
                let (seq, v) = enumerate_optimal(catalog, &env, DEFAULT_MAX_N)?;
                println!("brute force:  {seq}  expected payoff {v:.12}");
            } else {
                println!(
                    "brute force:  skipped ({} messages > {DEFAULT_MAX_N})",
                    catalog.len()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
