//! Command-line front end.
//!
//! `hybrid-squeeze <COMMAND> [CONFIG] [--output PATH] [--method NAME]
//! [--harmonics N] [--jobs K] [--seed S]`
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 solver failure
//! (non-convergence and other numerical failures), 3 instability at a
//! required point. Fatal errors print one machine-readable line to stderr:
//! `error: kind=<kind> exit=<code> message="<text>"`.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::solver::{SolveMethod, SolverError};

pub use commands::run;
pub use config::{parse_config, ConfigError, RunConfig, Spacing, SweepParameter, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Steady state at a single parameter point.
    Steady,
    /// Sweep of the drive ratio G+/G-.
    SweepRatio,
    /// Sweep of the cavity decay rate.
    SweepKappa,
    /// Drive-ratio curves for three atomic decay rates.
    Fig2,
    /// Ratio-optimised cavity-decay curves for one and two ensembles.
    Fig3,
    /// Floquet multipliers of the full drift.
    Stability,
    /// Drift matrices A(0), A(T/4), the rotating-wave drift and D.
    DumpMatrices,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::SweepRatio => "sweep-ratio",
            Command::SweepKappa => "sweep-kappa",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Stability => "stability",
            Command::DumpMatrices => "dump-matrices",
        }
    }

    /// Whether the command has built-in parameter defaults.
    fn config_optional(&self) -> bool {
        matches!(self, Command::Fig2 | Command::Fig3)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-squeeze",
    version,
    about = "Steady-state mechanical squeezing with two atomic ensembles"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML configuration file (optional for fig2 and fig3).
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Solver: lyapunov, time-integration or harmonic-balance.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<SolveMethod>,
    /// Initial harmonic truncation order.
    #[arg(long)]
    pub harmonics: Option<usize>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Accepted for interface stability; the pipeline is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_method(s: &str) -> Result<SolveMethod, String> {
    s.parse()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Config(_) => 1,
            CliError::Analysis(AnalysisError::Solver(e)) | CliError::Solver(e) => solver_code(e),
            CliError::Analysis(AnalysisError::NoStablePoint) => 3,
            CliError::Analysis(AnalysisError::InvalidCovariance { .. }) => 2,
            CliError::Analysis(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Analysis(AnalysisError::Params(_)) => "validation",
            CliError::Analysis(_) | CliError::Solver(_) => match self.exit_code() {
                3 => "instability",
                2 => "solver",
                _ => "validation",
            },
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

fn solver_code(e: &SolverError) -> i32 {
    if e.is_instability() {
        3
    } else if matches!(e, SolverError::InvalidOptions(_)) {
        1
    } else {
        2
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Regular output goes to `stdout`, the error line to `stderr`.
pub fn main_with_args<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match run_cli(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            let _ = writeln!(
                stderr,
                "error: kind={} exit={} message={:?}",
                e.kind(),
                code,
                e.to_string()
            );
            code
        }
    }
}

fn run_cli(cli: &Cli, stdout: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(path.display().to_string(), e))?;
            parse_config(&text)?
        }
        None if cli.command.config_optional() => parse_config("")?,
        None => {
            return Err(CliError::Usage(format!(
                "{} needs a configuration file",
                cli.command.name()
            )))
        }
    };
    if let Some(m) = cli.method {
        cfg.solver.method = m;
    }
    if let Some(n) = cli.harmonics {
        cfg.solver.harmonics = n;
    }
    if let Some(path) = &cli.output {
        cfg.output = Some(path.clone());
    }
    cfg.solver.validate()?;

    match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(|| run(cli.command, &cfg, stdout))
        }
        None => run(cli.command, &cfg, stdout),
    }
}
