//! Library entry point: preprocess, derive parameters, dispatch on precision, run the recursion.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::preprocess::preprocess;
use super::qr::{shifted_qr, DeflationTree, LoopOptions, MAX_RETRIES};
use super::{derive_run_params, required_precision_for, GlobalData, RunParams, DEFAULT_NET_CAP};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, HessenbergMatrix};
use crate::numkernel::{to_c64, Backend, DoubleDouble, PrecisionConfig, Real};
use crate::ritz::AberthSolver;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    /// Backward error target relative to the input's spectral norm.
    pub delta: f64,
    pub phi: f64,
    pub seed: u64,
    pub precision_bits: u32,
    pub b: Option<f64>,
    pub gap: Option<f64>,
    pub sigma: Option<f64>,
    pub degree: Option<usize>,
    pub net_cap: usize,
    pub max_retries: usize,
    pub capture_blocks: bool,
    /// Add the Gaussian perturbation before reduction.
    pub perturb: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            delta: 1e-6,
            phi: 0.01,
            seed: 0,
            precision_bits: 53,
            b: None,
            gap: None,
            sigma: None,
            degree: None,
            net_cap: DEFAULT_NET_CAP,
            max_retries: MAX_RETRIES,
            capture_blocks: false,
            perturb: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub eigenvalues: Vec<Complex<f64>>,
    /// Leaf block id for each eigenvalue.
    pub blocks: Vec<usize>,
    pub tree: DeflationTree,
    pub globals: GlobalData,
    pub run: RunParams,
    pub precision_bits: u32,
    pub required_bits: u32,
    /// The Hessenberg matrix the recursion started from.
    pub hessenberg: HessenbergMatrix<f64>,
    /// Spectral norm estimate of the input.
    pub input_norm: f64,
}

/// `B` and `Γ` from the perturbation scale when not supplied: `B = n/δ'`, `Γ = ‖A‖(δ'/n)²`, `δ' = δ/2`.
pub fn auto_bounds(n: usize, delta: f64, norm: f64) -> (f64, f64) {
    let dp = delta / 2.0;
    let nf = n as f64;
    ((nf / dp).max(1.0), norm * (dp / nf).powi(2))
}

/// Global data and run parameters for a preprocessed matrix.
pub fn derive_parameters(
    h: &HessenbergMatrix<f64>,
    input_norm: f64,
    cfg: &SolveConfig,
) -> Result<(GlobalData, RunParams)> {
    let n = h.n();
    let norm = input_norm.max(h.frobenius() / (n as f64).sqrt());
    let (auto_b, auto_gap) = auto_bounds(n, cfg.delta, norm);
    let b = cfg.b.unwrap_or(auto_b);
    let gap = cfg.gap.unwrap_or(auto_gap);
    let sigma = cfg.sigma.unwrap_or(2.0 * h.frobenius());
    let mut g = GlobalData::new(b, gap, sigma, n)?.with_net_cap(cfg.net_cap);
    if let Some(k) = cfg.degree {
        g = g.with_degree(k)?;
    }
    let rp = derive_run_params(n, cfg.delta * norm, cfg.phi, &g, cfg.seed)?;
    Ok((g, rp))
}

/// Shifted QR on `h` in the precision type `T` with the default small solver.
pub fn solve_hessenberg<T: Real>(
    h: &HessenbergMatrix<f64>,
    g: &GlobalData,
    rp: &RunParams,
    opts: LoopOptions,
) -> Result<(Vec<Complex<f64>>, Vec<usize>, DeflationTree)> {
    let out = shifted_qr(&h.cast::<T>(), g, rp, &AberthSolver::default(), opts)?;
    let (ev, ids) = out
        .eigenvalues
        .into_iter()
        .map(|(z, id)| (to_c64(z), id))
        .unzip();
    Ok((ev, ids, out.tree))
}

pub fn solve(a: &DenseMatrix<f64>, cfg: &SolveConfig) -> Result<Solution> {
    let n = a.n();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if !(cfg.delta > 0.0 && cfg.delta.is_finite()) {
        return Err(Error::Domain(format!(
            "delta must be positive, got {}",
            cfg.delta
        )));
    }
    let backend = PrecisionConfig::new(cfg.precision_bits)?.backend()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pre = preprocess(a, if cfg.perturb { cfg.delta } else { 0.0 }, &mut rng)?;
    if pre.h.frobenius() == 0.0 {
        return Err(Error::Degenerate("zero matrix: every eigenvalue is 0"));
    }
    let (g, rp) = derive_parameters(&pre.h, pre.input_norm, cfg)?;
    let required_bits = required_precision_for(&g, &rp, n);
    if cfg.precision_bits < required_bits {
        log::warn!(
            "working precision {} bits is below the {} bits required for the worst-case guarantee",
            cfg.precision_bits,
            required_bits
        );
    }
    let opts = LoopOptions {
        max_retries: cfg.max_retries,
        capture_blocks: cfg.capture_blocks,
    };
    let (eigenvalues, blocks, tree) = match backend {
        Backend::Binary32 => solve_hessenberg::<f32>(&pre.h, &g, &rp, opts)?,
        Backend::Binary64 => solve_hessenberg::<f64>(&pre.h, &g, &rp, opts)?,
        Backend::DoubleDouble => solve_hessenberg::<DoubleDouble>(&pre.h, &g, &rp, opts)?,
    };
    Ok(Solution {
        eigenvalues,
        blocks,
        tree,
        globals: g,
        run: rp,
        precision_bits: cfg.precision_bits,
        required_bits,
        hessenberg: pre.h,
        input_norm: pre.input_norm,
    })
}
