//! Random perturbation and Householder reduction of an arbitrary square input.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, HessenbergMatrix};
use crate::reduce::reduce_to_hessenberg;

const POWER_STEPS: usize = 60;

/// Spectral norm estimate from power iteration on `A^* A`.
pub fn spectral_norm_estimate(a: &DenseMatrix<f64>) -> f64 {
    let n = a.n();
    if n == 0 {
        return 0.0;
    }
    let frob = a.frobenius();
    if frob == 0.0 {
        return 0.0;
    }
    let ah = a.adjoint();
    // deterministic start with no special alignment to coordinate axes
    let mut x: Vec<Complex<f64>> = (0..n)
        .map(|i| Complex::new(1.0, 0.5 + i as f64 / n as f64))
        .collect();
    let mut sigma = 0.0;
    for _ in 0..POWER_STEPS {
        let y = matvec(a, &x);
        let z = matvec(&ah, &y);
        let nz = norm(&z);
        if nz == 0.0 {
            break;
        }
        sigma = (nz / norm(&x)).sqrt();
        x = z.iter().map(|v| v / nz).collect();
    }
    sigma.max(frob / (n as f64).sqrt())
}

fn matvec(a: &DenseMatrix<f64>, x: &[Complex<f64>]) -> Vec<Complex<f64>> {
    (0..a.n())
        .map(|i| a.row(i).iter().zip(x).map(|(aij, xj)| aij * xj).sum())
        .collect()
}

fn norm(x: &[Complex<f64>]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub h: HessenbergMatrix<f64>,
    /// Spectral norm estimate of the unperturbed input.
    pub input_norm: f64,
    /// Spectral norm of the added perturbation.
    pub perturbation_norm: f64,
}

/// Adds a complex Gaussian matrix of spectral norm `delta·‖A‖/2`, then reduces to Hessenberg form.
pub fn preprocess<R: Rng + ?Sized>(
    a: &DenseMatrix<f64>,
    delta: f64,
    rng: &mut R,
) -> Result<Preprocessed> {
    if a.n() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("input matrix"));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!(
            "delta must be a finite number >= 0, got {delta}"
        )));
    }
    let input_norm = spectral_norm_estimate(a);
    let target = delta * input_norm / 2.0;
    let mut perturbed = a.clone();
    let mut perturbation_norm = 0.0;
    if target > 0.0 {
        let g = DenseMatrix::from_fn(a.n(), |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        });
        let gn = spectral_norm_estimate(&g);
        if gn > 0.0 {
            let s = Complex::from(target / gn);
            perturbed = perturbed.add(&DenseMatrix::from_fn(a.n(), |i, j| g[(i, j)] * s));
            perturbation_norm = target;
        }
    }
    Ok(Preprocessed {
        h: reduce_to_hessenberg(&perturbed),
        input_norm,
        perturbation_norm,
    })
}
