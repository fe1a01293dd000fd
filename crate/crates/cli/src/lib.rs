//! Command-line front end for `schwarz-core`.
//!
//! Every subcommand produces a [`table::Table`] and a pass flag. The binary renders
//! the table as CSV or JSON, writes it to standard output or `--out`, and maps the
//! outcome to an [`ExitStatus`].

pub mod commands;
pub mod grid;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use schwarz_core::{KernelKind, QuadratureConfig};

use crate::grid::{DimGrid, RealGrid};
use crate::table::Table;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1729;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    CheckFailed = 1,
    Usage = 2,
    Accuracy = 3,
    Domain = 4,
    Io = 5,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] schwarz_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<grid::GridError> for CliError {
    fn from(e: grid::GridError) -> Self {
        CliError::Usage(e.0)
    }
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) => ExitStatus::Usage,
            CliError::Core(e) if e.is_accuracy() => ExitStatus::Accuracy,
            CliError::Core(_) => ExitStatus::Domain,
            CliError::Io(_) | CliError::Csv(_) => ExitStatus::Io,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "schwarz", version, about = "Boundary Schwarz constants, envelopes and verification reports")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Use brute-force paths (Monte Carlo, direct summation) where available.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Monte-Carlo samples per estimate.
    #[arg(long, global = true, default_value_t = 200_000)]
    pub samples: usize,
}

fn parse_kind(s: &str) -> Result<KernelKind, String> {
    s.parse().map_err(|e: schwarz_core::Error| e.to_string())
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Table of D_n(a), C_n and s⁻(a).
    Constants {
        #[arg(long, default_value = "2:5")]
        n: DimGrid,
        #[arg(long, default_value = "-0.5,0,0.5")]
        a_grid: RealGrid,
    },
    /// Upper and lower envelopes M_c^n(r), m_c^n(r).
    Envelope {
        #[arg(long, value_parser = parse_kind, default_value = "harmonic")]
        kind: KernelKind,
        #[arg(long, default_value = "3")]
        n: DimGrid,
        #[arg(long, default_value = "0.25,0.5,0.75")]
        c_grid: RealGrid,
        #[arg(long, default_value = "0:0.9:10")]
        r_grid: RealGrid,
    },
    /// Margin reports for every boundary inequality.
    Verify {
        #[arg(long, default_value = "2:4")]
        n: DimGrid,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value = "-0.5,0,0.5")]
        a_grid: RealGrid,
        /// Random cases for the Möbius and majorant checks.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Multiply every bound by 1.5 (forces failures).
        #[arg(long, hide = true)]
        corrupt_bound: bool,
    },
    /// Hyperbolic boundary quotient near r = 1 and its power-law fit.
    Hopf {
        #[arg(long, default_value = "3,4")]
        n: DimGrid,
        #[arg(long, default_value = "0.5")]
        c_grid: RealGrid,
        /// Radii; defaults to 1 − 2^−k for k = 4..14.
        #[arg(long)]
        r_grid: Option<RealGrid>,
    },
    /// Residuals of the ball-automorphism identities over random parameters.
    Mobius {
        /// Complex dimensions.
        #[arg(long, default_value = "1,2,3,8")]
        k: DimGrid,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

/// A rendered table and whether every check in it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl CommonArgs {
    /// Quadrature settings: the command's default with any tolerance overrides applied.
    pub fn quadrature(&self, base: QuadratureConfig) -> Result<QuadratureConfig, CliError> {
        QuadratureConfig::new(
            self.tol_abs.unwrap_or(base.abs_tol),
            self.tol_rel.unwrap_or(base.rel_tol),
            base.max_subdivisions,
        )
        .map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// Runs the parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    if c.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    match &cli.command {
        Command::Constants { n, a_grid } => commands::constants(c, n, a_grid),
        Command::Envelope {
            kind,
            n,
            c_grid,
            r_grid,
        } => commands::envelope(c, *kind, n, c_grid, r_grid),
        Command::Verify {
            n,
            m,
            a_grid,
            trials,
            corrupt_bound,
        } => commands::verify(c, n, *m, a_grid, *trials, *corrupt_bound),
        Command::Hopf { n, c_grid, r_grid } => commands::hopf(c, n, c_grid, r_grid.as_ref()),
        Command::Mobius { k, trials } => commands::mobius(c, k, *trials),
    }
}

/// Renders the outcome in the requested format.
pub fn render(outcome: &Outcome, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => outcome.table.to_csv()?,
        Format::Json => outcome.table.to_json(),
    })
}

/// Parses `args`, runs the command and writes its table; returns the exit status.
pub fn run_with_args<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Usage } else { ExitStatus::Pass };
        }
    };
    let result = execute(&cli).and_then(|outcome| {
        let text = render(&outcome, cli.common.format)?;
        match &cli.common.out {
            Some(path) => std::fs::write(path, text)?,
            None => {
                use std::io::Write;
                std::io::stdout().lock().write_all(text.as_bytes())?;
            }
        }
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitStatus::Pass,
        Ok(false) => {
            eprintln!("schwarz: one or more checks failed");
            ExitStatus::CheckFailed
        }
        Err(e) => {
            eprintln!("schwarz: {e}");
            e.status()
        }
    }
}
