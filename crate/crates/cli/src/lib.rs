//! Front end for the `nvneumann` binary: JSON problem configs, solves,
//! compatibility checks, convergence sweeps and the oracle identity suite.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{check_compat, converge, solve, verify, Sweep};
pub use config::ProblemConfig;

/// Process exit codes; stable across versions.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const CONFIG_INVALID: i32 = 2;
    pub const INCOMPATIBLE: i32 = 3;
    pub const NOT_CONVERGED: i32 = 4;
    pub const NO_ORACLE: i32 = 5;
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Incompatible(String),
    NotConverged(String),
    NoOracle,
    Io(std::io::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => exit::CONFIG_INVALID,
            CliError::Incompatible(_) => exit::INCOMPATIBLE,
            CliError::NotConverged(_) => exit::NOT_CONVERGED,
            CliError::NoOracle => exit::NO_ORACLE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid config: {m}"),
            CliError::Incompatible(m) => write!(f, "incompatible data: {m}"),
            CliError::NotConverged(m) => write!(f, "not converged: {m}"),
            CliError::NoOracle => write!(f, "config has no oracle solution (set \"oracle\": {{\"u\": ...}})"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<nvneumann::Error> for CliError {
    fn from(e: nvneumann::Error) -> Self {
        use nvneumann::Error as E;
        match e {
            E::Incompatible { .. } => CliError::Incompatible(e.to_string()),
            E::SingularSystem { .. } | E::IllConditioned(_) => CliError::NotConverged(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nvneumann",
    version,
    about = "Nonvariational Neumann solver for the planar Poisson equation"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Multiplies every compatibility and residual tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tol_scale: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the configured problem; print a report and write probe values.
    Solve { config: PathBuf },
    /// Run the oracle identity suite.
    Verify {
        /// Run only checks whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Probe error against the configured oracle over a resolution sweep.
    Converge {
        config: PathBuf,
        /// `N=64,128,256` or `K=4,8,16`.
        #[arg(long, value_parser = commands::parse_sweep)]
        sweep: Sweep,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report per-component compatibility defects.
    CheckCompat { config: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    FlipKprime,
}

/// Runs one command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Solve { config } => solve(config, cli.tol_scale, out),
        Command::Verify { filter, inject_fault } => verify(filter.clone(), inject_fault.is_some(), out),
        Command::Converge {
            config,
            sweep,
            out: path,
        } => converge(config, sweep, cli.tol_scale, path.as_deref(), out),
        Command::CheckCompat { config } => check_compat(config, cli.tol_scale, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}
