//! Parameter derivation and the recursive shifted QR loop.

mod deflate;
mod params;
mod preprocess;
mod qr;
mod solve;

pub use deflate::{deflate, split_at_zeros, zero_small_subdiagonals};
pub use params::{
    alpha_for, degree_for, derive_run_params, loop_drift_bits, required_precision,
    required_precision_for, theta_for, GlobalData, RunParams, CONTRACTION, DEFAULT_NET_CAP, GAMMA,
};
pub use preprocess::{preprocess, spectral_norm_estimate, Preprocessed};
pub use qr::{
    block_rng, shifted_qr, BlockNode, DeflationTree, IterationRecord, LoopOptions, QrOutput,
    StepKind, MAX_RETRIES,
};
pub use solve::{auto_bounds, derive_parameters, solve, solve_hessenberg, Solution, SolveConfig};
