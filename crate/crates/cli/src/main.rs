mod mm;
mod report;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hessqr::driver::{
    derive_parameters, derive_run_params, preprocess, required_precision_for, solve, SolveConfig,
};
use hessqr::{DenseMatrix, GlobalData};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mm::{read_matrix_market, MmError};
use crate::report::{write_trace, Report};

#[derive(Parser)]
#[command(
    name = "hessqr",
    version,
    about = "Randomized shifted QR eigenvalues for complex matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all eigenvalues of a Matrix Market matrix
    Solve(SolveArgs),
    /// Print derived parameters without solving
    Info(InfoArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Backward error target, relative to the spectral norm of the input
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    /// Failure probability budget
    #[arg(long, default_value_t = 0.01)]
    phi: f64,
    /// Seed for all randomness; drawn from the OS when absent
    #[arg(long)]
    seed: Option<u64>,
    /// Working precision in mantissa bits (24, 53 or up to 106)
    #[arg(long, default_value_t = 53)]
    bits: u32,
    /// Eigenvector condition bound B
    #[arg(long = "B")]
    b: Option<f64>,
    /// Lower bound on the minimum eigenvalue gap
    #[arg(long = "gamma-gap")]
    gamma_gap: Option<f64>,
    /// Upper bound on the norm
    #[arg(long)]
    sigma: Option<f64>,
    /// Shift degree, overriding the one derived from B
    #[arg(long)]
    degree: Option<usize>,
    /// Skip the random perturbation before Hessenberg reduction
    #[arg(long)]
    no_preprocess: bool,
    /// Worker threads for block-level parallelism
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Eigenvalue report path (stdout when absent)
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Potential trace CSV path
    #[arg(long)]
    out_trace: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    /// Matrix to derive parameters from; otherwise give --n, --B, --gamma-gap and --sigma
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: MmError },
    #[error(transparent)]
    Solve(#[from] hessqr::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Input {
                source: MmError::Parse { .. },
                ..
            } => 2,
            CliError::Input { .. } | CliError::Io(_) => 1,
            CliError::Solve(e) if e.is_probabilistic() => 3,
            CliError::Solve(_) => 2,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Common {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(CliError::Config(format!(
                "--delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(CliError::Config(format!(
                "--phi must lie in (0, 1), got {}",
                self.phi
            )));
        }
        if !(24..=106).contains(&self.bits) {
            return Err(CliError::Config(format!(
                "--bits must lie in 24..=106, got {}",
                self.bits
            )));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        Ok(())
    }

    fn config(&self, seed: u64) -> SolveConfig {
        SolveConfig {
            delta: self.delta,
            phi: self.phi,
            seed,
            precision_bits: self.bits,
            b: self.b,
            gap: self.gamma_gap,
            sigma: self.sigma,
            degree: self.degree,
            perturb: !self.no_preprocess,
            ..SolveConfig::default()
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            b = b.num_threads(t);
        }
        b.build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))
    }
}

fn read_input(path: &Path) -> Result<DenseMatrix<f64>, CliError> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    read_matrix_market(BufReader::new(f)).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_err(path, e))
}

fn run_solve(args: &SolveArgs) -> Result<(), CliError> {
    args.common.validate()?;
    let a = read_input(&args.input)?;
    let seed = args.common.seed();
    let cfg = args.common.config(seed);
    let start = Instant::now();
    let sol = args.common.pool()?.install(|| solve(&a, &cfg))?;
    eprintln!(
        "solved n = {} in {:.3} s (seed {seed})",
        a.n(),
        start.elapsed().as_secs_f64()
    );
    let json = serde_json::to_string_pretty(&Report::new(&sol)).expect("report serializes");
    match &args.out_json {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{json}")
                .and_then(|_| w.flush())
                .map_err(|e| io_err(p, e))?;
        }
        None => println!("{json}"),
    }
    if let Some(p) = &args.out_trace {
        write_trace(&sol, create(p)?).map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

fn run_info(args: &InfoArgs) -> Result<(), CliError> {
    let c = &args.common;
    c.validate()?;
    let seed = c.seed();
    let (g, rp, n) = match (&args.input, args.n) {
        (Some(path), _) => {
            let a = read_input(path)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pre = preprocess(&a, if c.no_preprocess { 0.0 } else { c.delta }, &mut rng)?;
            let (g, rp) = derive_parameters(&pre.h, pre.input_norm, &c.config(seed))?;
            (g, rp, a.n())
        }
        (None, Some(n)) => {
            let (Some(b), Some(gap), Some(sigma)) = (c.b, c.gamma_gap, c.sigma) else {
                return Err(CliError::Config(
                    "without an input matrix, --B, --gamma-gap and --sigma are required".into(),
                ));
            };
            let mut g = GlobalData::new(b, gap, sigma, n)?;
            if let Some(k) = c.degree {
                g = g.with_degree(k)?;
            }
            let rp = derive_run_params(n, c.delta * sigma / 2.0, c.phi, &g, seed)?;
            (g, rp, n)
        }
        (None, None) => return Err(CliError::Config("give an input matrix or --n".into())),
    };
    let required = required_precision_for(&g, &rp, n);
    println!("n = {n}");
    println!("B = {}", g.b);
    println!("Gamma = {:e}", g.gap_bound);
    println!("Sigma = {}", g.sigma);
    println!("k = {}", g.k);
    println!("alpha = {}", g.alpha);
    println!("theta = {}", g.theta);
    println!("gamma = {}", g.gamma);
    println!("delta = {:e}", rp.delta);
    println!("omega = {:e}", rp.omega);
    println!("phi_working = {:e}", rp.phi_working);
    println!("N_dec = {}", rp.n_dec);
    println!("required_bits = {required}");
    println!("configured_bits = {}", c.bits);
    if !g.degree_is_feasible() {
        println!(
            "note: degree {} is below the smallest feasible degree for B = {}",
            g.k, g.b
        );
    }
    if c.bits < required {
        println!(
            "warning: configured precision ({} bits) is below the required {required} bits",
            c.bits
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Info(a) => run_info(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
