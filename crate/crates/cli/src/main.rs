//! `subsel`: subset selection, kNN evaluation curves, filtered
//! active-learning runs, synthetic pools, and kernel dumps over feature
//! files.
//!
//! Every command is deterministic: identical inputs, flags, and `--rng-seed`
//! produce byte-identical outputs (opt into `--timings` to trade that away
//! for wall-clock numbers in the summary). Failures exit nonzero with a
//! one-line machine-readable JSON object on stderr: validation problems exit
//! 2, filesystem problems exit 3.

mod commands;
mod summary;

use clap::{Parser, Subcommand};
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use subsel::io::IoError;
use subsel::{
    ActiveLearningError, DataError, KernelError, ObjectiveError, OptimizerError, SynthError,
};

#[derive(Parser)]
#[command(name = "subsel", version, about, max_term_width = 100)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,

    /// Directory that receives all output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// On-disk format for datasets written by commands.
    #[arg(long, global = true, value_enum, default_value_t = commands::FormatArg::Csv)]
    format: commands::FormatArg,

    /// Worker threads for kernel construction (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Record wall-clock timings in the run summary. Timings vary run to
    /// run, so this forfeits byte-identical reruns.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a representative or diverse subset of a feature file.
    Select(commands::select::SelectArgs),
    /// Sweep subset fractions and report holdout kNN accuracy per method.
    EvalKnn(commands::eval_knn::EvalKnnArgs),
    /// Run filtered active-learning arms and emit their accuracy curves.
    Fass(commands::fass::FassArgs),
    /// Generate a synthetic Gaussian-mixture pool.
    Synth(commands::synth::SynthArgs),
    /// Dump a similarity or distance matrix for inspection.
    Kernel(commands::kernel::KernelArgs),
}

/// Settings shared by every command.
pub struct Ctx {
    pub rng_seed: u64,
    pub out: PathBuf,
    pub format: subsel::FileFormat,
    pub timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // A second build_global in the same process is harmless here: the
        // pool is only tuned, never relied on for results.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let ctx = Ctx {
        rng_seed: cli.rng_seed,
        out: cli.out,
        format: match cli.format {
            commands::FormatArg::Csv => subsel::FileFormat::Csv,
            commands::FormatArg::Bin => subsel::FileFormat::Binary,
        },
        timings: cli.timings,
    };
    let result = match cli.command {
        Command::Select(args) => commands::select::run(&ctx, args),
        Command::EvalKnn(args) => commands::eval_knn::run(&ctx, args),
        Command::Fass(args) => commands::fass::run(&ctx, args),
        Command::Synth(args) => commands::synth::run(&ctx, args),
        Command::Kernel(args) => commands::kernel::run(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": err.kind(), "message": err.to_string() })
            );
            ExitCode::from(err.exit_code())
        }
    }
}

/// Umbrella over every failure a command can hit, tagged for the error JSON.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(DataError),
    Kernel(KernelError),
    Objective(ObjectiveError),
    Optimizer(OptimizerError),
    Active(ActiveLearningError),
    Synth(SynthError),
    Io(IoError),
    Output(std::io::Error),
}

impl CliError {
    /// The variant name of the underlying module error, unwrapping
    /// pass-through wrappers so the tag names the root cause.
    pub fn kind(&self) -> String {
        match self {
            CliError::Usage(_) => "Usage".to_string(),
            CliError::Data(e) => variant_name(e),
            CliError::Kernel(e) => variant_name(e),
            CliError::Objective(e) => variant_name(e),
            CliError::Optimizer(OptimizerError::Objective(e)) => variant_name(e),
            CliError::Optimizer(e) => variant_name(e),
            CliError::Active(ActiveLearningError::Data(e)) => variant_name(e),
            CliError::Active(ActiveLearningError::Kernel(e)) => variant_name(e),
            CliError::Active(ActiveLearningError::Optimizer(e)) => variant_name(e),
            CliError::Active(e) => variant_name(e),
            CliError::Synth(e) => variant_name(e),
            CliError::Io(IoError::Data(e)) => variant_name(e),
            CliError::Io(e) => variant_name(e),
            CliError::Output(_) => "Io".to_string(),
        }
    }

    /// 2 for anything wrong with inputs or configuration, 3 for filesystem
    /// and stream failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(IoError::Io(_)) | CliError::Io(IoError::Csv(_)) | CliError::Output(_) => {
                3
            }
            _ => 2,
        }
    }
}

fn variant_name<T: fmt::Debug>(e: &T) -> String {
    let debug = format!("{e:?}");
    debug
        .split(['(', '{', ' '])
        .next()
        .unwrap_or("Error")
        .to_string()
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Data(e) => write!(f, "{e}"),
            CliError::Kernel(e) => write!(f, "{e}"),
            CliError::Objective(e) => write!(f, "{e}"),
            CliError::Optimizer(e) => write!(f, "{e}"),
            CliError::Active(e) => write!(f, "{e}"),
            CliError::Synth(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Output(e) => write!(f, "failed to write outputs: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

macro_rules! from_error {
    ($from:ty, $variant:ident) => {
        impl From<$from> for CliError {
            fn from(e: $from) -> Self {
                CliError::$variant(e)
            }
        }
    };
}

from_error!(DataError, Data);
from_error!(KernelError, Kernel);
from_error!(ObjectiveError, Objective);
from_error!(OptimizerError, Optimizer);
from_error!(ActiveLearningError, Active);
from_error!(SynthError, Synth);
from_error!(IoError, Io);
from_error!(std::io::Error, Output);
