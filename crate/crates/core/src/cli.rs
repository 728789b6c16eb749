//! The `cbo` command line.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 exact-solve
//! resource guard, 4 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use crate::analysis::{pairwise_distance, removal_frequency, select_diverse, FrequencyReport};
use crate::anneal::{anneal, AnnealConfig};
use crate::document::{Method, Provenance, RankedSolution, SolutionDocument};
use crate::error::{Error, Result};
use crate::exact::{count_feasible, enforce_guard, solve_topk, ExactSolveRequest};
use crate::gradients::{build_hessian, gradient_diagnostic, GradientMatrix};
use crate::model::{Hessian, DEFAULT_DEGENERACY_TOL};
use crate::qubo::{default_penalty, export_ising, export_qubo, to_ising, to_qubo};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_GUARD: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Environment variable holding the default worker thread count.
pub const THREADS_ENV: &str = "CBO_THREADS";

/// Mean-to-RMS gradient ratio above which the first-order warning fires.
pub const FIRST_ORDER_WARN_RATIO: f64 = 0.25;

#[derive(Debug, Parser)]
#[command(
    name = "cbo",
    version,
    about = "Select transformer blocks to remove by constrained binary optimization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a HESS-1 proxy Hessian from a GRAD-1 gradient file.
    BuildHessian(BuildHessianArgs),
    /// Solve for the low-energy spectrum and write a solution document.
    Solve(SolveArgs),
    /// Export the penalized QUBO or Ising form of a problem.
    Export(ExportArgs),
    /// Frequency, distance and diversity report for a solution document.
    Analyze(AnalyzeArgs),
    /// Print the number of feasible configurations C(N, M).
    Count(CountArgs),
}

#[derive(Debug, Args)]
pub struct BuildHessianArgs {
    #[arg(long)]
    pub gradients: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Anneal,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub hessian: PathBuf,
    /// Number of blocks to remove.
    #[arg(long)]
    pub m: usize,
    /// Number of low-energy states to report.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Annealing seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Refuse exact solves with more feasible configurations than this.
    #[arg(long, default_value = "10000000000", value_parser = parse_big)]
    pub guard_max_feasible: BigUint,
    /// Disable the exact-solve guard.
    #[arg(long)]
    pub no_guard: bool,
    /// Relative tolerance under which energies count as degenerate.
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOL)]
    pub degeneracy_tol: f64,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub pool_size: Option<usize>,
    #[arg(long)]
    pub t_initial: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Qubo,
    Ising,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub hessian: PathBuf,
    #[arg(long)]
    pub m: usize,
    /// Penalty weight; defaults to 1 + 4·N·max|H|.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub format: ExportFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub solutions: PathBuf,
    /// Number of leading solutions to count removal frequencies over.
    #[arg(long)]
    pub topk: usize,
    /// Also pick this many mutually distant candidates.
    #[arg(long)]
    pub select: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
}

/// Accepts plain integers and `<int>e<int>` shorthands such as `1e10`.
fn parse_big(s: &str) -> std::result::Result<BigUint, String> {
    let err = || format!("`{s}` is not a nonnegative integer");
    match s.split_once(['e', 'E']) {
        Some((mant, exp)) => {
            let mant: BigUint = mant.parse().map_err(|_| err())?;
            let exp: u32 = exp.parse().map_err(|_| err())?;
            Ok(mant * BigUint::from(10u32).pow(exp))
        }
        None => s.parse().map_err(|_| err()),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ResourceGuard { .. } => EXIT_GUARD,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Parses arguments, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildHessian(a) => cmd_build_hessian(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Export(a) => cmd_export(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Count(a) => {
            println!("{}", count_feasible(a.n, a.m)?);
            Ok(())
        }
    }
}

pub fn cmd_build_hessian(args: &BuildHessianArgs) -> Result<()> {
    let grads = GradientMatrix::load(&args.gradients)?;
    let diag = gradient_diagnostic(&grads);
    eprintln!(
        "gradients: {} samples x {} blocks; mean gradient norm {:e} ({:.3} of rms norm)",
        grads.m(),
        grads.n(),
        diag.mean_grad_norm,
        diag.relative_mean_norm()
    );
    if diag.relative_mean_norm() > FIRST_ORDER_WARN_RATIO {
        eprintln!(
            "warning: the mean gradient is large; the quadratic proxy assumes the first-order \
             term vanishes for a well-trained model, so energies may be unreliable"
        );
    }
    build_hessian(&grads).save(&args.out)
}

fn thread_count(requested: Option<usize>) -> Result<usize> {
    match requested {
        Some(0) => Err(Error::InvalidArgument(
            "thread count must be positive".into(),
        )),
        Some(t) => Ok(t),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let h = Hessian::load(&args.hessian)?;
    let n = h.n();
    if args.m == 0 || args.m >= n {
        return Err(Error::InvalidArgument(format!(
            "--m must satisfy 1 <= m < N = {n}, got {}",
            args.m
        )));
    }
    let threads = thread_count(args.threads)?;

    let doc = match args.method {
        MethodArg::Exact => {
            if !args.no_guard {
                enforce_guard(n, args.m, &args.guard_max_feasible)?;
            }
            let req = ExactSolveRequest {
                hessian: &h,
                m: args.m,
                k: args.k,
                degeneracy_tol: args.degeneracy_tol,
                threads,
            };
            let spectrum = solve_topk(&req)?;
            let prov = Provenance::for_hessian(&args.hessian, None);
            SolutionDocument::from_spectrum(n, args.m, Method::Exact, &spectrum, prov)
        }
        MethodArg::Anneal => {
            let mut cfg = AnnealConfig::default_for(&h);
            cfg.seed = args.seed;
            cfg.pool_size = args.pool_size.unwrap_or(args.k);
            cfg.degeneracy_tol = args.degeneracy_tol;
            if let Some(r) = args.restarts {
                cfg.restarts = r;
            }
            if let Some(s) = args.steps {
                cfg.steps_per_restart = s;
            }
            if let Some(t) = args.t_initial {
                cfg.t_initial = t;
                if args.t_final.is_none() {
                    cfg.t_final = 1e-6 * t;
                }
            }
            if let Some(t) = args.t_final {
                cfg.t_final = t;
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| {
                    Error::InvalidArgument(format!("cannot start {threads} worker threads: {e}"))
                })?;
            let mut spectrum = pool.install(|| anneal(&h, args.m, &cfg))?;
            spectrum.truncate(args.k);
            let prov = Provenance::for_hessian(&args.hessian, Some(args.seed));
            SolutionDocument::from_spectrum(n, args.m, Method::Anneal, &spectrum, prov)
        }
    };
    doc.save(&args.out)
}

pub fn cmd_export(args: &ExportArgs) -> Result<()> {
    let h = Hessian::load(&args.hessian)?;
    let lambda = match args.lambda {
        Some(l) if !(l > 0.0 && l.is_finite()) => {
            return Err(Error::InvalidArgument(format!(
                "--lambda must be positive, got {l}"
            )))
        }
        Some(l) => l,
        None => default_penalty(&h),
    };
    let q = to_qubo(&h, args.m, lambda)?;
    match args.format {
        ExportFormat::Qubo => export_qubo(&q, &args.out)?,
        ExportFormat::Ising => export_ising(&to_ising(&q), &args.out)?,
    }
    println!("lambda = {lambda}");
    Ok(())
}

/// JSON emitted by `cbo analyze`.
#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub frequency: FrequencyReport,
    pub distances: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diverse: Option<Vec<RankedSolution>>,
}

pub fn analyze_document(
    doc: &SolutionDocument,
    topk: usize,
    select: Option<usize>,
) -> Result<AnalysisReport> {
    let spectrum = doc.to_spectrum()?;
    let frequency = removal_frequency(&spectrum, topk)?;
    let distances = pairwise_distance(&spectrum);
    let diverse = match select {
        None => None,
        Some(k) => {
            let picks = select_diverse(&spectrum, k)?;
            Some(
                picks
                    .iter()
                    .map(|p| {
                        let rank = spectrum
                            .solutions()
                            .iter()
                            .position(|s| s.config == p.config)
                            .expect("selection comes from the spectrum");
                        RankedSolution::new(rank, p)
                    })
                    .collect(),
            )
        }
    };
    Ok(AnalysisReport {
        frequency,
        distances,
        diverse,
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let doc = SolutionDocument::load(&args.solutions)?;
    let report = analyze_document(&doc, args.topk, args.select)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &args.out {
        Some(path) => write_report(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_report(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
