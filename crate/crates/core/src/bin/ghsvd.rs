use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ghsvd::harness::{generate, run_pipeline, save_dataset, GeneratorSpec, Input, PhaseSet, RunConfig};
use ghsvd::hz::{HzConfig, StrategyKind, Variant};
use ghsvd::{Error, Lanes};

/// Generalized hyperbolic SVD of a factored Hermitian pencil.
///
/// Exit status: 0 on success, 1 on a numerical failure or a failed check,
/// 2 on bad arguments or I/O errors.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// Phases to run, e.g. `1-4`, `1,3,4` or `3-4` [default: from the
    /// dataset's first phase through 4]
    #[arg(long, env = "GHSVD_PHASES")]
    phases: Option<PhaseSet>,
    /// vp, bo or fb.
    #[arg(long, env = "GHSVD_VARIANT", default_value = "bo")]
    variant: Variant,
    /// Outer parallel strategy (mm or me).
    #[arg(long, env = "GHSVD_STRATEGY", default_value = "me")]
    strategy: StrategyKind,
    /// Strategy inside a block pair.
    #[arg(long, env = "GHSVD_INNER", default_value = "mm")]
    inner: StrategyKind,
    #[arg(long, env = "GHSVD_THREADS", default_value_t = 1)]
    threads: usize,
    /// Lanes per vector kernel: 1, 2, 4, 8 or 16.
    #[arg(long, env = "GHSVD_SIMD", default_value_t = 8)]
    simd: usize,
    #[arg(long, env = "GHSVD_MAX_SWEEPS", default_value_t = 30)]
    max_sweeps: usize,
    #[arg(long, env = "GHSVD_SEED", default_value_t = 1)]
    seed: u64,
    /// Generate the input, e.g. `gsvd-pair:n=64,m=80,kappa=1e3,neg=16`.
    #[arg(long = "gen", conflicts_with = "input", required_unless_present = "input")]
    generator: Option<GeneratorSpec>,
    /// Read the input from a dataset directory.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Write the generated dataset here and exit.
    #[arg(long, requires = "generator")]
    save_dataset: Option<PathBuf>,
    /// Write report and factors here.
    #[arg(long, env = "GHSVD_OUT")]
    out: Option<PathBuf>,
    /// Compare with the dense Cholesky-based reference solver.
    #[arg(long)]
    oracle: bool,
    /// Pass threshold on eigenvalue differences.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn run(cli: Cli) -> ghsvd::Result<bool> {
    let lanes = Lanes::new(cli.simd).ok_or_else(|| Error::Config(format!("unsupported lane width {}", cli.simd)))?;
    if let (Some(dir), Some(spec)) = (&cli.save_dataset, &cli.generator) {
        save_dataset(dir, &generate(spec, cli.seed)?)?;
        println!("dataset written to {}", dir.display());
        return Ok(true);
    }
    let input = match (cli.generator, cli.input) {
        (Some(g), _) => Input::Generate(g),
        (None, Some(p)) => Input::Dir(p),
        (None, None) => unreachable!("clap requires an input"),
    };
    let cfg = RunConfig {
        phases: cli.phases,
        input,
        hz: HzConfig {
            variant: cli.variant,
            outer: cli.strategy,
            inner: cli.inner,
            max_sweeps: cli.max_sweeps,
            threads: cli.threads,
            lanes,
            want_uv: false,
        },
        out: cli.out,
        seed: cli.seed,
        oracle: cli.oracle,
        tol: cli.tol,
    };
    let outcome = run_pipeline(&cfg)?;
    if cli.json {
        println!("{}", outcome.report.to_json());
    } else {
        print!("{}", outcome.report.to_text());
    }
    Ok(outcome.report.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 1 } else { 2 })
        }
    }
}
