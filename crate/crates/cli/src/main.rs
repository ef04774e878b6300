use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flatscreen::geometry::ShapeDescriptor;
use flatscreen_cli::{
    cmd_farfield, cmd_invert, cmd_solve, cmd_uniqueness, cmd_verify, CliError, ExperimentConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "flatscreen",
    version,
    about = "Direct and inverse scattering by flat sound-soft screens"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (TOML). Optional for `verify`.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `output_dir` in the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed of every sampled check; overrides `seed` in the configuration.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the density and report the boundary residual.
    Solve,
    /// Compute the far-field pattern of a solved or loaded density.
    Farfield {
        /// Tabulate the decay of the far-field approximation error with distance.
        #[arg(long)]
        verify_asymptotics: bool,
    },
    /// Recover the screen's support from a far-field CSV.
    Invert,
    /// Compare the far-fields and supports of two screens.
    Uniqueness,
    /// Run the property suite.
    Verify,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match (&cli.config, &cli.command) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Command::Verify) => {
            ExperimentConfig::new(1.0, ShapeDescriptor::Disk { radius: 1.0 })
        }
        (None, _) => return Err(CliError::Config("--config PATH is required".into())),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
        config.verify.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).unwrap_or_default()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads: must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let config = load_config(cli)?;
    let out = config.output_dir.clone();
    match &cli.command {
        Command::Solve => {
            let summary = cmd_solve(&config, &out)?;
            if let Some(w) = &summary.warning {
                eprintln!("warning: {w}");
            }
            println!("{}", json(&summary));
        }
        Command::Farfield { verify_asymptotics } => {
            let summary = cmd_farfield(&config, &out, *verify_asymptotics)?;
            println!("{}", json(&summary));
        }
        Command::Invert => {
            let summary = cmd_invert(&config, &out)?;
            println!("{}", json(&summary));
        }
        Command::Uniqueness => {
            let report = cmd_uniqueness(&config, &out)?;
            println!("{}", json(&report));
        }
        Command::Verify => {
            let report = cmd_verify(&config, &out)?;
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{status} {:<34} {:.3e} (tolerance {:.1e})",
                    c.name, c.value, c.tolerance
                );
            }
            if !report.all_passed() {
                return Err(CliError::CheckFailed("property suite failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
