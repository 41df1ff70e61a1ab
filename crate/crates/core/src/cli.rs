//! Command-line front end: `gamegen`, `solve` and `sweep`.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 configuration or usage error,
//! 3 numerical failure (the trace rows written so far are kept).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::blocks::BlockStrategy;
use crate::error::{GameError, RegularizerError, SolverError};
use crate::games::{generate, load_game, save_game, GameInstance};
use crate::regularizer::LocalKind;
use crate::solvers::sweep::{sweep, threads_from_env, write_sweep};
use crate::solvers::trace::{format_float, TraceWriter};
use crate::solvers::{run_solver_with, Algorithm, Averaging, Init, RunConfig};

pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "efg-cyclic",
    version,
    about = "Zero-sum extensive-form game solvers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark game and write it in EFG-SF v1 format.
    Gamegen {
        /// kuhn, matching_pennies, leduc[N], goofspiel[N], liars_dice[F], battleship[S]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one solver configuration and write its trace CSV.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(
            long = "multiplier-exp",
            default_value_t = 0,
            allow_negative_numbers = true
        )]
        multiplier_exp: i32,
        /// Trace CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run multipliers 2^0..2^l_max and report the final gap of each.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "l-max", default_value_t = 14)]
        l_max: u32,
        /// Summary CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Game name or path to an EFG-SF v1 file.
    #[arg(long)]
    pub game: String,
    #[arg(long, default_value = "ecyclicpda")]
    pub algorithm: String,
    /// entropy or euclidean [default: entropy]
    #[arg(long)]
    pub regularizer: Option<String>,
    /// uniform, linear or quadratic [default: per algorithm]
    #[arg(long)]
    pub averaging: Option<String>,
    /// single, infosets, children or postorder [default: single]
    #[arg(long)]
    pub blocks: Option<String>,
    /// Gradient computations.
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    /// Restart fraction in (0, 1), or "off".
    #[arg(long = "restart-beta", default_value = "off")]
    pub restart_beta: String,
    /// Gradient computations between checkpoints [default: 10, or 100 for large games]
    #[arg(long)]
    pub cadence: Option<u64>,
    /// Start from a random interior point drawn from this seed instead of uniform.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Numerical(_)
            | SolverError::Infeasible(_)
            | SolverError::Regularizer(RegularizerError::NonFiniteInput { .. })
            | SolverError::Regularizer(RegularizerError::CenterNotInterior { .. }) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// A name is generated; anything else that exists on disk is loaded.
pub fn resolve_game(spec: &str) -> Result<GameInstance, GameError> {
    match generate(spec) {
        Err(GameError::UnknownGame(_)) if Path::new(spec).exists() => load_game(spec),
        other => other,
    }
}

/// Builds the run configuration and the warnings for options the chosen
/// algorithm ignores.
pub fn build_config(
    run: &RunArgs,
    multiplier_exp: Option<i32>,
) -> Result<(RunConfig, Vec<String>), SolverError> {
    let algorithm: Algorithm = run.algorithm.parse()?;
    let mut warnings = Vec::new();
    let regularizer = match &run.regularizer {
        Some(r) => {
            let kind: LocalKind = r.parse()?;
            if !algorithm.uses_regularizer() {
                warnings.push(format!("--regularizer is ignored by {algorithm}"));
            }
            kind
        }
        None => LocalKind::Entropy,
    };
    let blocks = match &run.blocks {
        Some(b) => {
            let s: BlockStrategy = b.parse()?;
            if !algorithm.uses_blocks() {
                warnings.push(format!("--blocks is ignored by {algorithm}"));
            }
            s
        }
        None => BlockStrategy::Single,
    };
    if multiplier_exp.is_some_and(|l| l != 0) && !algorithm.uses_regularizer() {
        warnings.push(format!("--multiplier-exp is ignored by {algorithm}"));
    }
    let averaging = run
        .averaging
        .as_deref()
        .map(str::parse::<Averaging>)
        .transpose()?;
    let restart_beta = match run.restart_beta.as_str() {
        "off" => None,
        s => Some(
            s.parse::<f64>()
                .map_err(|_| SolverError::Config(format!("bad restart beta '{s}'")))?,
        ),
    };
    let cfg = RunConfig {
        algorithm,
        regularizer,
        averaging,
        blocks,
        multiplier_exp: multiplier_exp.unwrap_or(0),
        budget: run.budget,
        cadence: run.cadence,
        restart_beta,
        init: run.seed.map_or(Init::Uniform, Init::Random),
        anchor: None,
        target_gap: None,
    };
    cfg.validate()?;
    Ok((cfg, warnings))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn cmd_gamegen(name: &str, out: Option<&Path>) -> Result<(), CliError> {
    let g = generate(name)?;
    let (nx, ny, nnz) = g.dims();
    if let Some(path) = out {
        save_game(&g, path)?;
    }
    println!("dims: {nx} {ny}");
    println!("nnz: {nnz}");
    Ok(())
}

pub fn cmd_solve(run: &RunArgs, multiplier_exp: i32, out: Option<&Path>) -> Result<(), CliError> {
    let (cfg, warnings) = build_config(run, Some(multiplier_exp))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let game = resolve_game(&run.game)?;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut writer = TraceWriter::new(sink)?;
    let mut write_err = None;
    let result = run_solver_with(&game, &cfg, |c| {
        if write_err.is_none() {
            write_err = writer.write(c).err();
        }
    });
    writer.into_inner().flush()?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    let trace = result?;
    let summary = format!(
        "final gap: {}\niterations: {}\ngrad computations: {}\nrestarts: {}",
        format_float(trace.final_gap()),
        trace.iterations,
        trace.grad_computations,
        trace.restarts
    );
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

pub fn cmd_sweep(run: &RunArgs, l_max: u32, out: Option<&Path>) -> Result<(), CliError> {
    let (cfg, warnings) = build_config(run, None)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if !cfg.algorithm.uses_regularizer() {
        eprintln!(
            "warning: {} has no stepsize; every row is the same run",
            cfg.algorithm
        );
    }
    let game = resolve_game(&run.game)?;
    let rows = sweep(&game, &cfg, l_max, threads_from_env())?;
    match out {
        Some(p) => write_sweep(&rows, create(p)?)?,
        None => write_sweep(&rows, io::stdout().lock())?,
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gamegen { name, out } => cmd_gamegen(&name, out.as_deref()),
        Command::Solve {
            run,
            multiplier_exp,
            out,
        } => cmd_solve(&run, multiplier_exp, out.as_deref()),
        Command::Sweep { run, l_max, out } => cmd_sweep(&run, l_max, out.as_deref()),
    }
}

/// Parses the process arguments, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
