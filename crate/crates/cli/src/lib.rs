//! Command-line front end for the `kuniform` library.
//!
//! Every command writes one JSON report (to `--out`, or stdout) and, where a
//! table makes sense, a CSV file. Reports contain no wall-clock data unless
//! `--timing` is given, so a rerun with the same arguments reproduces the
//! report byte for byte at any `--threads` setting.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{Output, Report};

/// Exit status for a completed run.
pub const EXIT_OK: i32 = 0;
/// Exit status for numerical failures and other runtime errors.
pub const EXIT_RUNTIME: i32 = 1;
/// Exit status for unparsable arguments, specs or input files.
pub const EXIT_PARSE: i32 = 2;
/// Exit status for size-guard violations.
pub const EXIT_GUARD: i32 = 3;
/// Exit status for I/O failures.
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Core(#[from] kuniform::Error),
    #[error("{0}")]
    Input(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use kuniform::Error as E;
        match self {
            CliError::Usage(e) if !e.use_stderr() => EXIT_OK,
            CliError::Usage(_) | CliError::Input(_) => EXIT_PARSE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Pool(_) => EXIT_RUNTIME,
            CliError::Core(e) => match e {
                E::Parse(_) | E::Json(_) | E::Invalid(_) | E::Dimension(_) | E::NotApplicable(_) => EXIT_PARSE,
                E::Guard { .. } => EXIT_GUARD,
                E::Io(_) => EXIT_IO,
                E::Numerical(_) => EXIT_RUNTIME,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "kuniform", version, about = "Approximate equilibria on k-uniform strategy grids")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report path (the artifact path for `gen`). Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV path. Defaults to the report path with a `.csv` extension.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print the JSON report on stdout even when `--out` is given.
    #[arg(long, global = true)]
    pub json: bool,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Print nothing on stdout when `--out` is given.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a game descriptor, explicit tensor or 0/1 matrix.
    Gen(GenArgs),
    /// Check a profile or distribution against an equilibrium concept.
    Verify(VerifyArgs),
    /// Sample k-uniform profiles or distributions from an exact equilibrium.
    Sample(SampleArgs),
    /// Scan the k-uniform grid for an (ε, δ)-weak Nash equilibrium.
    Gridsearch(GridArgs),
    /// Search the 1/k cube around an exact equilibrium.
    Cube(CubeArgs),
    /// Discrepancy of a 0/1 matrix.
    Disc(DiscArgs),
    /// Discrepancy ↔ near-half equilibrium correspondence.
    Equiv(EquivArgs),
    /// Regret-matching trials with hitting times.
    Dynamics(DynamicsArgs),
    /// Support-size audit of one regret-matching trace on the XOR game.
    Audit(AuditArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    Xor,
    Observer,
    MajorityMp,
    RandomExplicit,
    MatchingPennies,
    /// Random t-regular 0/1 matrix in the text format.
    Matrix,
    /// Random explicit game written as a payoff tensor.
    Explicit,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: GenFamily,
    #[arg(long, default_value_t = 3)]
    pub kappa: u32,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Actions (explicit) or columns (matrices); defaults to `n` for matrices.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub t: usize,
    #[arg(long, default_value_t = 16)]
    pub b: usize,
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
    #[arg(long, default_value_t = 0)]
    pub observers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Concept {
    Nash,
    Ce,
    Ir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IrMethodArg {
    Exact,
    Analytic,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Game descriptor: a file, a JSON object or a `family:key=value` line.
    #[arg(long)]
    pub game: String,
    #[arg(long, conflicts_with = "distribution")]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub distribution: Option<PathBuf>,
    /// Defaults to `ce` with `--distribution`, else `nash`.
    #[arg(long, value_enum)]
    pub concept: Option<Concept>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Estimate payoffs by Monte-Carlo with this many samples per action.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = IrMethodArg::Exact)]
    pub ir_method: IrMethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleMode {
    WeakNash,
    WeakCe,
    Concentration,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub game: String,
    #[arg(long, value_enum, default_value_t = SampleMode::WeakNash)]
    pub mode: SampleMode,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Grid size; defaults to the sufficient bound for ε, δ and m.
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = kuniform::sampling::DEFAULT_MAX_ATTEMPTS)]
    pub attempts: usize,
    /// Exact equilibrium (or concentration profile); defaults to the
    /// family's declared equilibrium.
    #[arg(long, conflicts_with = "distribution")]
    pub profile: Option<PathBuf>,
    /// Correlated source for `weak-ce`.
    #[arg(long)]
    pub distribution: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    pub eps_hat: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub player: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridMode {
    /// Stop at the first passing profile.
    First,
    /// Evaluate every profile.
    Scan,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub game: String,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long, value_enum, default_value_t = GridMode::First)]
    pub mode: GridMode,
}

#[derive(Debug, Args)]
pub struct CubeArgs {
    #[arg(long)]
    pub game: String,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub epsilon: f64,
    /// Sample this many vertices instead of scanning all of them.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Cube center; defaults to the family's declared equilibrium.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiscMethodArg {
    Exact,
    Bf,
}

#[derive(Debug, Args)]
pub struct DiscArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = DiscMethodArg::Exact)]
    pub method: DiscMethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    #[value(alias = "forward")]
    Fwd,
    #[value(alias = "reverse")]
    Rev,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum)]
    pub direction: DirectionArg,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    /// Reverse direction: sampled profiles when the grid is too large.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long)]
    pub game: String,
    /// Rounds per trial.
    #[arg(long = "T")]
    pub rounds: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub game: String,
    #[arg(long = "T")]
    pub rounds: usize,
    /// Which trial of a `dynamics` run to replay.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CliResult<Output>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    execute(Cli::try_parse_from(args)?)
}

pub fn execute(cli: Cli) -> CliResult<Output> {
    let start = Instant::now();
    let global = cli.global.clone();
    let dispatch = || commands::dispatch(&cli.command, &global);
    let mut output = match global.threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(dispatch)?,
        None => dispatch()?,
    };
    if global.timing {
        output.set_elapsed(start.elapsed().as_secs_f64() * 1e3);
    }
    output.write(&global)?;
    Ok(output)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(args) {
        Ok(_) => EXIT_OK,
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
