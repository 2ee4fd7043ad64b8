#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "optospring",
    version,
    about = "Noise budget and cooling design for a levitated disk mirror"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// INI config; the bundled design point is used when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// CSV output file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full noise budget at the configured point.
    Budget {
        #[command(flatten)]
        common: Common,
    },
    /// Cooling-rate ratio surface over detuning and laser linewidth.
    Fig2 {
        #[command(flatten)]
        common: Common,
        /// dlo,dhi,dn,llo,lhi,ln in units of kappa.
        #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Budget versus one config parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted key such as cavity.detuning, in the config's units.
        #[arg(long, value_name = "PATH")]
        param: String,
        /// lo,hi
        #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
        range: String,
        /// Number of samples, at least 2.
        #[arg(long, value_name = "N")]
        points: usize,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
    },
    /// Stochastic oracle from the [oracle] section.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        /// Exit 3 when the fit misses the analytic value by more than 3 sigma.
        #[arg(long)]
        strict: bool,
    },
    /// Optimal detuning for the configured cavity.
    Optimize {
        #[command(flatten)]
        common: Common,
    },
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("OPTOSPRING_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "OPTOSPRING_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), CliError> {
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Budget { common } => commands::budget(&common.load()?, common.out.as_deref()),
        Command::Fig2 { common, grid } => {
            commands::fig2(&common.load()?, grid.as_deref(), common.out.as_deref())
        }
        Command::Sweep {
            common,
            param,
            range,
            points,
            log,
        } => commands::sweep(
            &common.load_raw()?,
            &param,
            &range,
            points,
            log,
            common.out.as_deref(),
        ),
        Command::Simulate {
            common,
            seed,
            strict,
        } => commands::simulate(&common.load()?, seed, strict, common.out.as_deref()),
        Command::Optimize { common } => commands::optimize(&common.load()?),
    }
}

impl Common {
    fn text(&self) -> Result<String, CliError> {
        match &self.config {
            Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            }),
            None => Ok(config::BUNDLED.to_string()),
        }
    }

    fn load_raw(&self) -> Result<config::RawConfig, CliError> {
        Ok(config::RawConfig::parse(&self.text()?)?)
    }

    fn load(&self) -> Result<config::RunConfig, CliError> {
        Ok(config::RunConfig::parse(&self.text()?)?)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Exit code 2 is reserved for "no net cooling", so usage errors map to 1.
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
