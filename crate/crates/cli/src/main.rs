mod commands;
mod pool;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};

/// Exact areas, Dehn functions and mean Dehn functions of finite presentations.
///
/// Exit status: 0 success, 1 error, 2 result is only an upper bound.
#[derive(Debug, Parser)]
#[command(name = "dehnlab", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Longest intermediate cyclic word in the first search pass.
    #[arg(long, global = true, default_value_t = 16, env = "DEHNLAB_CAPS_LENGTH", value_parser = clap::value_parser!(u64).range(1..))]
    pub caps_length: u64,
    /// Largest area the search looks for.
    #[arg(long, global = true, default_value_t = 64, env = "DEHNLAB_CAPS_AREA", value_parser = clap::value_parser!(u64).range(1..))]
    pub caps_area: u64,
    /// States stored per search pass.
    #[arg(long, global = true, default_value_t = 4_000_000, env = "DEHNLAB_CAPS_STATES", value_parser = clap::value_parser!(u64).range(1..))]
    pub caps_states: u64,
    /// Live cosets allowed during coset enumeration.
    #[arg(long, global = true, default_value_t = 200_000, env = "DEHNLAB_COSET_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    pub coset_budget: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, env = "DEHNLAB_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text, env = "DEHNLAB_FORMAT")]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, env = "DEHNLAB_OUT")]
    pub out: Option<PathBuf>,
}

/// A presentation file or a registered family.
#[derive(Debug, Args)]
pub struct Target {
    /// Presentation file (`gens:` / `rels:` format).
    #[arg(conflicts_with = "family")]
    pub presentation: Option<PathBuf>,
    /// Registered family: G1, G1K, ZPQ1, ZPQ2, EX24, G2, G3, DIH, DIHALT, DIHK, D4N.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_key_value)]
    pub params: Vec<(String, String)>,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal area of a null-homotopic word, with a filling certificate.
    Area {
        presentation: PathBuf,
        word: String,
        /// Write the certificate JSON to this path.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Dehn function table up to --nmax, with a heuristic growth label.
    Dehn {
        #[command(flatten)]
        target: Target,
        #[arg(long, env = "DEHNLAB_NMAX")]
        nmax: usize,
    },
    /// Mean Dehn function at radius --nmax.
    Mean {
        #[command(flatten)]
        target: Target,
        #[arg(long, short = 'n', env = "DEHNLAB_NMAX")]
        nmax: usize,
        /// Compare with the closed forms for the cyclic family G1.
        #[arg(long)]
        oracle: bool,
    },
    /// Spherical mean Dehn function at radius --nmax.
    Smean {
        #[command(flatten)]
        target: Target,
        #[arg(long, short = 'n', env = "DEHNLAB_NMAX")]
        nmax: usize,
        #[arg(long)]
        oracle: bool,
    },
    /// Every null-homotopic word of length <= --nmax with its area.
    Census {
        presentation: PathBuf,
        #[arg(long, short = 'n', env = "DEHNLAB_NMAX")]
        nmax: usize,
    },
    /// Check group orders, generator bounds and the null-generator policy of
    /// family members. Member parameters accept lists and ranges: `p=2,3,5`,
    /// `n=2..8`.
    Validate {
        #[arg(long)]
        family: String,
        #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_key_value)]
        params: Vec<(String, String)>,
        /// Radius whose relevant members are checked when no member
        /// parameter is given.
        #[arg(long, default_value_t = 12)]
        nmax: usize,
    },
    /// Growth label for a Dehn table, computed or read from a CSV file.
    Growth {
        #[command(flatten)]
        target: Target,
        #[arg(long, env = "DEHNLAB_NMAX", required_unless_present = "table")]
        nmax: Option<usize>,
        /// CSV written by `dehnlab dehn --format csv`.
        #[arg(long, conflicts_with_all = ["presentation", "family"])]
        table: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit 1: status 2 is reserved for inexact results.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Inexact) => ExitCode::from(2),
        Err(e) => {
            report(&e);
            ExitCode::from(1)
        }
    }
}

fn report(e: &CliError) {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
}
