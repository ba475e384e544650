//! Command-line front end for `qtruncate-core`.
//!
//! [`run`] parses an argument vector, executes one command and returns the
//! text destined for stdout and stderr together with the exit code, so the
//! binary and the tests share one code path. Exit codes are `0` on success,
//! `1` on any configuration or parse error and `2` when verification or
//! optimization completes but fails its criterion.

mod commands;
pub mod output;
pub mod parse;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{cmd_optimize, cmd_simulate, cmd_sweep, cmd_verify, Report};

/// Worker-count override for the parallel engines.
pub const THREADS_ENV: &str = "QTRUNCATE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{field}: {reason}")]
    Config { field: String, reason: String },
    #[error(transparent)]
    Core(#[from] qtruncate_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "qtruncate",
    version,
    about = "Linear-optical quantum scissors and punching devices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a signal through a device and report the heralded output.
    Simulate(SimulateArgs),
    /// Re-evaluate the published device settings.
    Verify(VerifyArgs),
    /// Search device parameters for a target pattern.
    Optimize(OptimizeArgs),
    /// Scan one parameter (or a tied set) over a grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct DeviceArgs {
    /// Circuit JSON file (explicit elements or a preset record).
    #[arg(long, conflicts_with_all = ["preset", "t2", "xi"])]
    pub circuit: Option<PathBuf>,
    /// qsd6, qsd8 or qsd8-alt-K.
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated transmittances t², literals such as (3-sqrt(3))/6 allowed.
    #[arg(long, allow_hyphen_values = true)]
    pub t2: Option<String>,
    /// Comma-separated phases, literals such as pi/2 allowed.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct HeraldArgs {
    /// Ancilla photon counts on modes 1..N-1 (default: all zero).
    #[arg(long)]
    pub ancilla: Option<String>,
    /// Heralding counts on modes 2..N (default: the ancilla counts).
    #[arg(long)]
    pub detect: Option<String>,
    /// trunc:D, punch:D:K1,K2 or fock:D:K (default: trunc with D = ancilla total + 1).
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub herald: HeraldArgs,
    /// coherent:ALPHA[:CUTOFF], fock:K or custom:FILE.
    #[arg(long, default_value = "coherent:1")]
    pub signal: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Eight-port wirings to evaluate: all, or a list of l0, alt-1 … alt-4.
    #[arg(long, default_value = "all")]
    pub wiring: String,
    /// Restrict to these catalog entries (comma-separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub entry: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub preset: String,
    /// Transmittances; `?` marks a searched entry (default: all searched).
    #[arg(long, allow_hyphen_values = true)]
    pub t2: Option<String>,
    /// Phases; `?` marks a searched entry (default: all searched).
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[command(flatten)]
    pub herald: HeraldArgs,
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub preset: String,
    /// Transmittances; the swept entries may be given as `?`.
    #[arg(long, allow_hyphen_values = true)]
    pub t2: String,
    /// Phases; the swept entries may be given as `?`.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    /// Swept parameter by element number, e.g. T4, XI4, or a tied set T2,T4.
    #[arg(long)]
    pub param: String,
    /// a:b:steps, endpoints inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub range: String,
    #[command(flatten)]
    pub herald: HeraldArgs,
    /// Signal for the probability column.
    #[arg(long, default_value = "coherent:1")]
    pub signal: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Everything a finished invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize =
            v.trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Config {
                    field: THREADS_ENV.to_string(),
                    reason: format!("`{v}` is not a positive integer"),
                })?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config {
        field: THREADS_ENV.to_string(),
        reason: e.to_string(),
    })
}

fn execute(command: &Command) -> Result<Report, CliError> {
    let pool = thread_pool()?;
    pool.install(|| match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Sweep(a) => cmd_sweep(a),
    })
}

fn out_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Simulate(a) => a.output.out.as_ref(),
        Command::Verify(a) => a.output.out.as_ref(),
        Command::Optimize(a) => a.output.out.as_ref(),
        Command::Sweep(a) => a.output.out.as_ref(),
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                code: 1,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    let mut outcome = Outcome {
        code: report.code,
        stdout: String::new(),
        stderr: report.notes,
    };
    match out_path(&cli.command) {
        Some(path) => {
            if let Err(source) = std::fs::write(path, &report.body) {
                let e = CliError::Io {
                    path: path.clone(),
                    source,
                };
                outcome.code = 1;
                outcome.stderr.push_str(&format!("error: {e}\n"));
            }
        }
        None => outcome.stdout = report.body,
    }
    outcome
}
