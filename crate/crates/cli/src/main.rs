//! `nlgreen`: runs the kernel, norm, solver and limit-theorem checks from a
//! JSON run file and writes CSV tables plus a JSON verdict.
//!
//! Exit status: 0 pass, 1 property failure, 2 usage or config error.

mod config;
mod expr;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlgreen::experiments::Verdict;
use nlgreen::Error;

use config::{Overrides, Resolved, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::GoodMeasure(_)
                | Error::Supercritical { .. }
                | Error::Divergence { .. }
                | Error::MonotonicityBroken(_)
                | Error::Unordered(_)
                | Error::Singular
                | Error::InvalidTestFunction(_)
                | Error::WindowViolation => 1,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nlgreen", version, about = "Green-operator laboratory for semilinear nonlocal equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel envelope band and operator symmetry/positivity.
    KernelCheck(Common),
    /// Lebesgue and Marcinkiewicz norms of the profile corpus.
    Norms(Common),
    /// Solve u + G[g(u)] = G[mu].
    Solve(Common),
    /// Kato inequalities.
    Kato(Common),
    /// Boundary blow-up along an approach ray.
    Boundary(Common),
    /// Criticality sweep over a refinement ladder.
    Sweep(Common),
    /// Weak-convergence stability under mollification.
    Stability(Common),
    /// Full property suite.
    Verify(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Named kernel preset.
    #[arg(short, long)]
    preset: Option<String>,
    /// Output directory (default: $NLGREEN_OUT, then ./nlgreen-out).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Mesh resolution override.
    #[arg(long)]
    resolution: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn split(self) -> (&'static str, Common) {
        match self {
            Command::KernelCheck(c) => ("kernel-check", c),
            Command::Norms(c) => ("norms", c),
            Command::Solve(c) => ("solve", c),
            Command::Kato(c) => ("kato", c),
            Command::Boundary(c) => ("boundary", c),
            Command::Sweep(c) => ("sweep", c),
            Command::Stability(c) => ("stability", c),
            Command::Verify(c) => ("verify", c),
        }
    }
}

fn execute(name: &str, args: Common) -> Result<Verdict, CliError> {
    let raw = match &args.config {
        Some(p) => config::load(p)?,
        None => RunConfig::default(),
    };
    let ov = Overrides { preset: args.preset, out: args.out, seed: args.seed, resolution: args.resolution, threads: args.threads };
    let cfg = Resolved::new(name, raw, ov)?;
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::Usage("threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let out = run::dispatch(&cfg)?;
    run::emit(&cfg, &out)?;
    println!("{name}: {:?} -> {}", out.verdict, cfg.output.display());
    Ok(out.verdict)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, args) = cli.command.split();
    match execute(name, args) {
        Ok(Verdict::Fail) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
