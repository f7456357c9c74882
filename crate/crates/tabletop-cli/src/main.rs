//! Command-line front end for the scene-analysis pipeline.
//!
//! Five subcommands cover the full loop: `synth` fabricates a scenario
//! bundle, `estimate` turns 3D-3D correspondences into an initial
//! scene, `analyze` refines that scene against keypoint measurements
//! and emits a scene graph with query marginals, `infer` answers the
//! same queries for a hand-written evidence file, and `oracle`
//! cross-checks the production inference and likelihood paths against
//! independent reference implementations.
//!
//! Exit codes: 0 success, 2 usage (including exact-mode capacity),
//! 3 malformed input, 4 infeasible model, 5 oracle mismatch, 1 for
//! everything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tabletop_core::Error;

mod analyze;
mod config;
mod estimate;
mod infer;
mod oracle;
mod output;
mod synth;

/// Table-top scene analysis: fit box scenes to noisy pose estimates and
/// ask which objects are false detections or rest on something unseen.
#[derive(Parser)]
#[command(name = "tabletop", version)]
struct Cli {
    /// Seed for anything randomized; stochastic commands refuse to run
    /// without one (flag or chain.seed in the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Parameter file of `key = value` lines; flags win over it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory the command writes its files into.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scenario bundle and print its answer key.
    Synth(synth::SynthArgs),
    /// Estimate initial object poses from 3D-3D correspondences.
    Estimate(estimate::EstimateArgs),
    /// Refine a scene against measurements; emit graph, marginals, trace.
    Analyze(analyze::AnalyzeArgs),
    /// Query marginals for an evidence file, no geometry involved.
    Infer(infer::InferArgs),
    /// Cross-check inference and likelihood on a scenario bundle.
    Oracle(oracle::OracleArgs),
}

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation: missing seed, conflicting flags, or a request the
    /// configured limits cannot honor.
    Usage(String),
    Core(Error),
    /// Production and reference implementations disagree.
    Mismatch(String),
}

pub type CmdResult<T> = Result<T, Failure>;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            // Exceeding the exact-enumeration cap is a remedy-by-flag
            // problem (pick gibbs or auto), not a malformed input.
            Failure::Core(Error::Capacity { .. }) => 2,
            Failure::Core(
                Error::Parse { .. }
                | Error::Schema(_)
                | Error::Json(_)
                | Error::InvalidScene(_),
            ) => 3,
            Failure::Core(Error::Infeasible { .. }) => 4,
            Failure::Mismatch(_) => 5,
            Failure::Core(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage: {m}"),
            Failure::Core(e) => e.to_string(),
            Failure::Mismatch(m) => format!("oracle mismatch: {m}"),
        }
    }
}

/// Reads a file the user named on the command line.
pub(crate) fn read_input(path: &std::path::Path) -> CmdResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::Core(Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    })
}

fn main() -> ExitCode {
    // Die quietly when a pipe reader goes away (`tabletop ... | head`)
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let config = match config::load(cli.config.as_deref(), cli.seed) {
        Ok(c) => c,
        Err(f) => return fail(f),
    };
    let result = match &cli.command {
        Command::Synth(args) => synth::run(args, &config, &cli.out),
        Command::Estimate(args) => estimate::run(args, &config, &cli.out),
        Command::Analyze(args) => analyze::run(args, &config, &cli.out),
        Command::Infer(args) => infer::run(args, &config, &cli.out),
        Command::Oracle(args) => oracle::run(args, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("error: {}", f.message());
    ExitCode::from(f.exit_code())
}
