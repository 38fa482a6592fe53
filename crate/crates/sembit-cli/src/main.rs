use clap::{Parser, Subcommand};
use sembit_cli::commands;
use sembit_cli::config::{ConfigError, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sembit",
    about = "Rate regions for uplink coexistence of semantic text users and a bit user (FDMA / NOMA / RSMA)",
    version
)]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Channel seed (overrides the config's scenario.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the rate-region boundaries (FDMA, NOMA, RSMA, time sharing).
    Region,
    /// Fit logistic similarity parameters to an `snr_db,similarity` CSV.
    Fit {
        /// Two-column sample CSV with header `snr_db,similarity`.
        #[arg(long)]
        samples: PathBuf,
        /// Semantic symbols per word the samples belong to.
        #[arg(long)]
        k: u32,
    },
    /// Bit rate per scheme as the number of semantic users grows.
    SweepUsers,
    /// Rate regions at several sentence-similarity thresholds.
    SweepThreshold,
    /// Split-fraction experiments (two-bit baseline and coexistence).
    Alpha,
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(&path.display().to_string())?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.scenario.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.display().to_string();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("warning: could not size thread pool: {e}");
        }
    }

    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e @ (ConfigError::Parse { .. } | ConfigError::Io { .. })) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let result = match &cli.command {
        Command::Region => commands::cmd_region(&cfg),
        Command::Fit { samples, k } => commands::cmd_fit(&cfg, samples, *k),
        Command::SweepUsers => commands::cmd_sweep_users(&cfg),
        Command::SweepThreshold => commands::cmd_sweep_threshold(&cfg),
        Command::Alpha => commands::cmd_alpha(&cfg),
    };

    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(warnings) => {
            eprintln!("warning: {warnings} sweep point(s) infeasible");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if e.downcast_ref::<ConfigError>().is_some() {
                eprintln!("error: {e}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}
