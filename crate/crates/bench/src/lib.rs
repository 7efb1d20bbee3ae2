//! Seeded inputs shared by the benchmarks.

use hessqr::reduce::reduce_to_hessenberg_with_q;
use hessqr::{Complex, DenseMatrix, HessenbergMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entry(rng: &mut ChaCha8Rng) -> Complex<f64> {
    Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

pub fn random_hessenberg(n: usize, seed: u64) -> HessenbergMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HessenbergMatrix::from_dense_truncated(DenseMatrix::from_fn(n, |_, _| entry(&mut rng)))
}

/// `U diag(λ) U^* + E` with `λ` spread over the unit disk and a small dense `E`.
pub fn near_normal(n: usize, seed: u64) -> DenseMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DenseMatrix::from_fn(n, |_, _| entry(&mut rng));
    let (_, u) = reduce_to_hessenberg_with_q(&g);
    let lam: Vec<_> = (0..n)
        .map(|_| {
            Complex::from_polar(
                rng.random::<f64>().sqrt(),
                rng.random::<f64>() * std::f64::consts::TAU,
            )
        })
        .collect();
    let d = DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            lam[i]
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let scale = 1e-2 / (n as f64).sqrt();
    let e = DenseMatrix::from_fn(n, |_, _| entry(&mut rng) * scale);
    u.matmul(&d).matmul(&u.adjoint()).add(&e)
}
