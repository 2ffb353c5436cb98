//! Batch runs writing CSV/JSON reports.
//!
//! `heisenberg-lab [--config PATH] [--out DIR] [--seed N] [--set KEY=VALUE]... <command>`
//!
//! Exit codes: 0 success, 1 a criterion failed (or an output could not be
//! written), 2 usage or configuration error.

mod check;
mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use check::{run_checks, CheckKind, CheckRow};
pub use config::{default_tolerances, GeodesicConfig, RunConfig, TestFunctionKind};

use crate::error::LabError;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

// Library errors surface only for inputs the library rejects.
impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "heisenberg-lab", version, about = "Numerical experiments on the Heisenberg group")]
struct Args {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, created if needed.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override one config field, e.g. `--set fd_step=0.1` or `--set geodesic.samples=5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hardy quotient and the α-sweep of the trial family.
    Hardy,
    /// Plancherel defect along the truncation ladder.
    Plancherel,
    /// Logarithmic divergence of the deficiency candidate.
    Deficiency,
    /// Print B_α as CSV.
    DeltaSpectrum {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Tabulate the exponential chart and the distance along rays.
    Geodesic,
    /// Invariant suite of every module.
    Check,
}

/// Parses `args` (program name first), runs one command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(args) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Usage(_) => 2,
                CliError::Failure(_) => 1,
            }
        }
    }
}

fn dispatch(args: Args) -> Result<bool, CliError> {
    let mut overrides = args.set.clone();
    if let Command::DeltaSpectrum { alpha, truncation } = &args.command {
        overrides.extend(alpha.iter().map(|a| format!("alpha={a}")));
        overrides.extend(truncation.iter().map(|n| format!("delta_truncation={n}")));
    }
    let mut config = RunConfig::load(args.config.as_deref(), &overrides)?;
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = Output::new(&config.output_dir);
    match args.command {
        Command::Hardy => commands::hardy(&config, &out),
        Command::Plancherel => commands::plancherel(&config, &out),
        Command::Deficiency => commands::deficiency(&config, &out),
        Command::DeltaSpectrum { .. } => commands::delta_spectrum(&config, &out),
        Command::Geodesic => commands::geodesic(&config, &out),
        Command::Check => check::check(&config, &out),
    }
}

pub(crate) struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: &Path) -> Self {
        Output { dir: dir.to_path_buf() }
    }

    pub(crate) fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(path)
    }
}

/// Round-trip-exact CSV number.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.16e}")
}
