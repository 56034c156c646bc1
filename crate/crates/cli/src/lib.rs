//! `yamabe`: Tables of the explicit bounds, certified scans, radial
//! ODE runs, counterexample exponent reports and sigma lower bounds.
//!
//! Exit codes: 0 success, 1 violation or solver failure, 2 usage error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod output;

pub use output::{Cell, CommandOutput, Format, OutputConfig, Tabular};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "yamabe", version, about = "Explicit lower bounds for smooth Yamabe invariants")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Significant digits of decimal output.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=1000), global = true)]
    pub digits: u32,
    /// Working precision of certified intervals.
    #[arg(long = "precision-bits", default_value_t = 256, value_parser = clap::value_parser!(u32).range(24..=1_000_000), global = true)]
    pub precision_bits: u32,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Y(S^n), Lambda_{n,>=2} and lambda_n for a range of dimensions.
    Table {
        #[arg(default_value_t = 7)]
        n_lo: i64,
        #[arg(default_value_t = 18)]
        n_hi: i64,
    },
    /// Certified scans over a range of dimensions.
    Scan {
        #[arg(value_enum)]
        kind: ScanArg,
        /// First dimension; defaults to 7, 11 and 1100 for the three kinds.
        from: Option<i64>,
        /// Last dimension; defaults to 3000, 5000 and 1200.
        to: Option<i64>,
    },
    /// Radial Yamabe equation on H_c^{k+1} x S^{n-k-1}.
    Ode(OdeArgs),
    /// Lower bound for sigma from surgery data or a topological class.
    Sigma(SigmaArgs),
    /// Integrability exponents of the codimension-3 counterexample.
    Counterexample {
        n: i64,
        #[arg(long, value_enum, default_value_t = ConventionArg::Derived)]
        convention: ConventionArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanArg {
    /// Lambda_{n,>=2} is attained at k = 2.
    MinK,
    /// lambda_n against Lambda_{n,>=2}.
    Compare,
    /// lambda_n^n / Lambda_{n,2}^n >= 1.43.
    Ratio,
}

impl ScanArg {
    pub fn default_range(self) -> (i64, i64) {
        match self {
            ScanArg::MinK => (7, 3000),
            ScanArg::Compare => (11, 5000),
            ScanArg::Ratio => (1100, 1200),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Derived,
    PaperStated,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct OdeArgs {
    pub n: i64,
    pub k: i64,
    pub c: f64,
    /// Defaults to n(n-1).
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub u0: Option<f64>,
    /// Integrate from `--u0`.
    #[arg(long)]
    pub integrate: bool,
    /// Bisect on u(0) between the two values.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub shoot: Option<Vec<f64>>,
    /// Shoot (or integrate from `--u0`) and evaluate the decay dichotomy.
    #[arg(long)]
    pub check: bool,
    /// Classification radius.
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    /// Local error tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Also write the trajectory CSV here.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("class").required(true).multiple(false)))]
pub struct SigmaArgs {
    pub n: i64,
    /// Surgery dimensions, comma separated; empty for S^n itself.
    #[arg(long, group = "class", num_args = 0.., value_delimiter = ',')]
    pub dims: Option<Vec<i64>>,
    #[arg(long, group = "class")]
    pub two_connected_spin_boundary: bool,
    #[arg(long, group = "class")]
    pub alpha_zero: bool,
    #[arg(long, group = "class")]
    pub alpha_nonzero: bool,
}

/// Rendered result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Failure before any result exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VIOLATION,
            message: message.into(),
        }
    }
}

impl From<yamabe_core::Error> for CliError {
    fn from(e: yamabe_core::Error) -> Self {
        match e {
            yamabe_core::Error::Solver(_) => CliError::failure(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

pub fn execute(cli: &Cli) -> Result<CommandOutput, CliError> {
    let cfg = OutputConfig {
        format: cli.format,
        precision_bits: cli.precision_bits,
        sig_digits: cli.digits as usize,
    };
    match &cli.command {
        Command::Table { n_lo, n_hi } => commands::cmd_table(*n_lo, *n_hi, &cfg),
        Command::Scan { kind, from, to } => {
            let (lo, hi) = kind.default_range();
            commands::cmd_scan(*kind, from.unwrap_or(lo), to.unwrap_or(hi), &cfg)
        }
        Command::Ode(a) => commands::cmd_ode(a, &cfg),
        Command::Sigma(a) => commands::cmd_sigma(a, &cfg),
        Command::Counterexample { n, convention } => {
            commands::cmd_counterexample(*n, *convention, &cfg)
        }
    }
}

/// Parses `args` (program name first), runs the command and renders it.
///
/// With `--output` the rendering goes to that file and `stdout` stays empty.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let text = out.render(cli.format);
            let mut stderr: String = out.diagnostics.iter().map(|d| format!("{d}\n")).collect();
            let stdout = match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                        return Outcome { code: EXIT_VIOLATION, stdout: String::new(), stderr };
                    }
                    String::new()
                }
                None => text,
            };
            Outcome { code: out.code, stdout, stderr }
        }
        Err(e) => Outcome {
            code: e.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message),
        },
    }
}
