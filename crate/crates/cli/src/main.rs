//! `quenchlab`: batch front-end over the rate-function laboratory.
//!
//! Each subcommand reads a sectioned `key = value` config file, runs one
//! analysis from the core library, and writes CSV artifacts plus JSON
//! sidecars and a `manifest.json` into the output directory. Identical
//! configs produce byte-identical artifacts for a given tool version.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Config, ConfigError};
use output::OutDir;

/// Exit-code policy: 2 for config problems, 3 for I/O, 4 for numeric
/// domain or range violations. Success is 0 and nothing else is used.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<quenchlab_core::Error> for CliError {
    fn from(e: quenchlab_core::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

#[derive(Args)]
struct Common {
    /// Run parameters: a sectioned key = value file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Directory the artifacts are written into (created if absent).
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Worker-pool size; defaults to the number of cores. Output bytes do
    /// not depend on it.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Seed recorded in the manifest; reserved for synthetic-data runs.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Parser)]
#[command(
    name = "quenchlab",
    version,
    about = "Rate-function laboratory for suddenly coupled boson baths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate function on a time grid, optionally with derivatives and
    /// thermal weighting.
    Rate {
        #[command(flatten)]
        common: Common,
    },
    /// Free-induction decay: coherence under the thermal rate.
    Fid {
        #[command(flatten)]
        common: Common,
    },
    /// Geometric phase of the echo on a time grid.
    Geomphase {
        #[command(flatten)]
        common: Common,
        /// Include the linear winding term instead of subtracting it.
        #[arg(long)]
        include_linear: bool,
    },
    /// Complex-time zeros of the echo in a rectangle, plus the per-branch
    /// crossing report.
    Fisher {
        #[command(flatten)]
        common: Common,
    },
    /// Critical-time scaling: exponent fits, the short-time crossover, or
    /// the size sweep, selected by [scaling] mode.
    Scaling {
        #[command(flatten)]
        common: Common,
    },
    /// Physical mode table of the clamped circular membrane.
    Membrane {
        #[command(flatten)]
        common: Common,
    },
    /// Resolve and emit the spectrum table itself (loadable back via
    /// kind = file), optionally with a binned spectral density.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rate { .. } => "rate",
            Command::Fid { .. } => "fid",
            Command::Geomphase { .. } => "geomphase",
            Command::Fisher { .. } => "fisher",
            Command::Scaling { .. } => "scaling",
            Command::Membrane { .. } => "membrane",
            Command::Spectrum { .. } => "spectrum",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Rate { common }
            | Command::Fid { common }
            | Command::Fisher { common }
            | Command::Scaling { common }
            | Command::Membrane { common }
            | Command::Spectrum { common } => common,
            Command::Geomphase { common, .. } => common,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let name = cli.command.name();
    let common = cli.command.common();

    if let Some(n) = common.workers {
        // First come, first served; the pool only affects wall time.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }

    let mut cfg = Config::load(&common.config)?;
    // Flag overrides are folded into the config before hashing, so the
    // recorded hash names the run actually performed.
    if let Command::Geomphase {
        include_linear: true,
        ..
    } = cli.command
    {
        cfg.set("geomphase", "include_linear", "true");
    }
    commands::ensure_known(name, &cfg)?;
    let hash = cfg.hash();

    let mut out = OutDir::new(&common.out)?;
    match name {
        "rate" => commands::rate(&cfg, &hash, &mut out)?,
        "fid" => commands::fid(&cfg, &hash, &mut out)?,
        "geomphase" => commands::geomphase(&cfg, &hash, &mut out)?,
        "fisher" => commands::fisher(&cfg, &hash, &mut out)?,
        "scaling" => commands::scaling(&cfg, &hash, &mut out)?,
        "membrane" => commands::membrane(&cfg, &hash, &mut out)?,
        "spectrum" => commands::spectrum(&cfg, &hash, &mut out)?,
        _ => unreachable!("clap restricts the subcommand set"),
    }
    out.finish(name, &hash, common.seed, started)
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
