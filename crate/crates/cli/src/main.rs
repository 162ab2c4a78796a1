//! `mlpreach` — reachable-set estimation and safety verification for MLPs.
//!
//! Exit codes: 0 SAFE / success, 10 UNSAFE, 11 UNCERTAIN, 64 usage error,
//! 66 missing input file, 70 internal error.

mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::FileConfig;
use failure::{exit, Failure};

#[derive(Debug, Parser)]
#[command(name = "mlpreach", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print F(x) at full precision.
    Eval(Common),
    /// Print the maximum sensitivity at a point, with the per-layer trace.
    Sensitivity(Common),
    /// Write the reachtube table for the input set.
    Reach(Common),
    /// Check the safety spec; the exit code carries the verdict.
    Verify(Common),
    /// Monte-Carlo containment check of a reach estimate.
    Sample(Common),
    /// Write two-link arm kinematics rows `theta1,theta2,x,y`.
    GenArmData(Common),
}

/// Flags shared by every command; each one overrides the config file.
#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Network document (JSON).
    #[arg(long)]
    network: Option<PathBuf>,
    /// Lattice / perturbation radius.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count (`sample`).
    #[arg(long)]
    samples: Option<usize>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input point, comma separated (`eval`, `sensitivity`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<f64>>,
    /// Exported tube table to check instead of recomputing (`sample`).
    #[arg(long)]
    tubes: Option<PathBuf>,
    /// Grid points per joint (`gen-arm-data`).
    #[arg(long)]
    grid: Option<usize>,
}

/// Effective settings after merging the config file and the flags.
#[derive(Debug, Default)]
pub struct Run {
    pub file: FileConfig,
    pub grid: Option<usize>,
}

fn merge(flags: Common) -> Result<Run, Failure> {
    let mut file = match &flags.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    macro_rules! over {
        ($($f:ident),*) => { $( if flags.$f.is_some() { file.$f = flags.$f; } )* };
    }
    over!(network, delta, seed, samples, workers, out, point, tubes);
    let grid = flags.grid.or_else(|| file.arm.as_ref().and_then(|a| a.grid));
    Ok(Run { file, grid })
}

fn init_workers(workers: Option<usize>) -> Result<(), Failure> {
    match workers {
        Some(0) => Err(Failure::Usage("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string())),
        None => Ok(()),
    }
}

type Handler = fn(&Run) -> Result<i32, Failure>;

fn run(cli: Cli) -> Result<i32, Failure> {
    let (cmd, flags): (Handler, Common) = match cli.command {
        Command::Eval(c) => (commands::eval, c),
        Command::Sensitivity(c) => (commands::sensitivity, c),
        Command::Reach(c) => (commands::reach, c),
        Command::Verify(c) => (commands::verify, c),
        Command::Sample(c) => (commands::sample, c),
        Command::GenArmData(c) => (commands::gen_arm_data, c),
    };
    let run = merge(flags)?;
    init_workers(run.file.workers)?;
    cmd(&run)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("mlpreach: {f}");
            f.code()
        }
    };
    ExitCode::from(code as u8)
}
