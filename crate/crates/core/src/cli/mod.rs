//! Config-driven front end: `varlp <command> --config <path> [--strict] [--seed <u64>] [--out <dir>]`.
//!
//! Exit status: 0 when every hard assertion holds, 1 when one fails, 2 for a malformed
//! config, 3 for a hypothesis violation under `--strict`, 4 for a numerical abort.
//! `VARLP_THREADS` caps the worker threads.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use serde::Deserialize;

use commands::{execute, Context, Failure};
use config::RunConfig;
use output::{config_hash, Manifest, Sink};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Luxemburg norms of the constant 1 or of a corpus.
    Norm,
    /// Convolution and product estimates.
    Verify,
    /// Smoothing estimates of the fractional heat semigroup.
    Semigroup,
    /// Picard iteration for the mild problem, with the existence gate.
    Solve,
    /// Summarise the reports already in the output directory.
    Report,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Norm => "norm",
            Self::Verify => "verify",
            Self::Semigroup => "semigroup",
            Self::Solve => "solve",
            Self::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    AssertionFailed = 1,
    Schema = 2,
    Hypothesis = 3,
    Numerical = 4,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "varlp",
    version,
    about = "Variable-exponent norms, convolution estimates and a fractional Navier-Stokes solver"
)]
pub struct Args {
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    /// Turn hypothesis violations into exit status 3.
    #[arg(long)]
    pub strict: bool,
    /// Overrides `seed` in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `output.directory` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let args = Args::parse();
    ExitCode::from(run(&args).code())
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var("VARLP_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Schema(format!("VARLP_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}

/// Runs one command and writes its artifacts. Errors go to stderr.
pub fn run(args: &Args) -> Status {
    match try_run(args) {
        Ok(s) => s,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.status()
        }
    }
}

fn try_run(args: &Args) -> Result<Status, Failure> {
    let bytes = std::fs::read(&args.config).map_err(|e| Failure::Schema(format!("{}: {e}", args.config.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Schema(format!("{}: not valid UTF-8", args.config.display())))?;
    let cfg = RunConfig::parse(&text, &args.config)?;
    let seed = args.seed.or(cfg.seed);
    cfg.check_command(args.command, seed)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.directory));

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::Numerical(format!("thread pool: {e}")))?;

    let ctx = Context { cfg: &cfg, seed, strict: args.strict, out: &out };
    let mut sink = Sink::new(&out, &cfg.output.formats);
    let status = pool.install(|| execute(&ctx, args.command, &mut sink))?;
    let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    sink.finish(Manifest {
        schema_version: output::REPORT_SCHEMA_VERSION,
        command: args.command.as_str(),
        config_sha256: config_hash(&bytes),
        varlp_version: env!("CARGO_PKG_VERSION"),
        seed,
        strict: args.strict,
        threads: pool.current_num_threads(),
        timestamp_unix,
        files: Vec::new(),
    })?;
    println!("wrote {}", out.display());
    Ok(status)
}
