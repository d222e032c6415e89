use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use edgeworth::commands::{self, Engine, OracleOptions, Output};
use edgeworth::config::{parse_n_list, parse_spec, Grid, SpecConfig};
use edgeworth::CliError;
use edgeworth_core::OracleConfig;

/// Corrected Edgeworth expansions for heavy-tailed sums.
#[derive(Parser)]
#[command(name = "edgeworth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Spec file (key=value lines).
    spec: PathBuf,
    /// Comma separated sample sizes.
    #[arg(long, default_value = "10")]
    n: String,
    /// Grid as min:max:count.
    #[arg(long, default_value = "-3:3:121", allow_hyphen_values = true)]
    grid: String,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian, Edgeworth terms, correction and total on a grid.
    Expand {
        #[command(flatten)]
        common: Common,
        /// Highest Edgeworth order kept (0 keeps none).
        #[arg(long)]
        orders: Option<usize>,
    },
    /// Reference density of the normalized sum.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "inversion")]
        engine: String,
        /// Monte Carlo sample count.
        #[arg(long)]
        samples: Option<u64>,
        /// Monte Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Kernel bandwidth for Monte Carlo (0 selects a histogram).
        #[arg(long)]
        bandwidth: Option<f64>,
    },
    /// Errors of Gaussian, Edgeworth and corrected densities against inversion.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the command recorded in a CSV file's manifest header.
    Rerun {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common) -> Result<(SpecConfig, Vec<u64>, Grid), CliError> {
    let text = std::fs::read_to_string(&common.spec)?;
    Ok((parse_spec(&text)?, parse_n_list(&common.n)?, Grid::parse(&common.grid)?))
}

fn emit(out: Output, path: Option<PathBuf>) -> Result<(), CliError> {
    let mut out = out;
    if let Some(p) = &path {
        out.manifest.options.push(("out".into(), p.display().to_string()));
    }
    let text = out.render();
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let Some(s) = out.summary {
        eprintln!("{s}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Expand { common, orders } => {
            let (spec, ns, grid) = load(&common)?;
            emit(commands::expand(&spec, &ns, grid, orders)?, common.out)
        }
        Command::Oracle { common, engine, samples, seed, bandwidth } => {
            let (spec, ns, grid) = load(&common)?;
            let mut config = OracleConfig::default();
            if let Some(s) = samples {
                config.mc_samples = s;
            }
            if let Some(s) = seed {
                config.mc_seed = s;
            }
            if let Some(b) = bandwidth {
                config.kde_bandwidth = b;
            }
            let opts = OracleOptions { engine: Engine::parse(&engine)?, config };
            emit(commands::oracle(&spec, &ns, grid, &opts)?, common.out)
        }
        Command::Compare { common } => {
            let (spec, ns, grid) = load(&common)?;
            emit(commands::compare(&spec, &ns, grid, &OracleConfig::default())?, common.out)
        }
        Command::Rerun { csv, out } => {
            let text = std::fs::read_to_string(csv)?;
            emit(commands::rerun(&text)?, out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edgeworth: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
