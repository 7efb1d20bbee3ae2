//! Ritz values of the trailing corner, the θ-optimality test, shift regularization and the
//! dichotomy: either the regularized Ritz values are good shifts, or one of them decouples.

mod aberth;

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

pub use aberth::{certified_eigenvalues, hyman_det, AberthSolver, Certified};

use crate::driver::GlobalData;
use crate::error::{Error, Result};
use crate::iqr::{iqr_multi, potential_pow};
use crate::matrix::{DenseMatrix, HessenbergMatrix, ShiftList};
use crate::numkernel::{cabs, sample_disk, Real, Scaled};

/// Eigenvalues of a small matrix to absolute accuracy `beta`, except with probability `phi`.
pub trait SmallEigSolver<T: Real>: Sync {
    fn solve(&self, m: &DenseMatrix<T>, beta: f64, phi: f64) -> Result<Vec<Complex<T>>>;
}

/// Adapts a closure to [`SmallEigSolver`].
pub struct FnSolver<F>(pub F);

impl<T: Real, F> SmallEigSolver<T> for FnSolver<F>
where
    F: Fn(&DenseMatrix<T>, f64, f64) -> Result<Vec<Complex<T>>> + Sync,
{
    fn solve(&self, m: &DenseMatrix<T>, beta: f64, phi: f64) -> Result<Vec<Complex<T>>> {
        (self.0)(m, beta, phi)
    }
}

#[derive(Clone, Debug)]
pub struct RitzOutcome<T: Real> {
    pub next_h: HessenbergMatrix<T>,
    /// Regularized Ritz values `Ř`.
    pub ritz_values: ShiftList<T>,
    /// Corner eigenvalues as returned by the solver, before regularization.
    pub solver_values: Vec<Complex<T>>,
    pub dec: bool,
    /// The regularized value whose k-fold shift decoupled.
    pub culprit: Option<Complex<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizationParams {
    pub eta1: f64,
    pub eta2: f64,
    pub beta: f64,
}

impl RegularizationParams {
    pub fn for_call(omega: f64, sigma: f64, k: usize, phi: f64) -> Self {
        let beta = omega * omega / (16.0 * 101.0 * sigma);
        let eta2 = beta / 2.0;
        let eta1 = eta2 / (2.0 * k as f64 / phi).sqrt();
        Self { eta1, eta2, beta }
    }
}

/// `ř_i = r_i + w_i` with independent `w_i ~ Unif(D(0, η₂))`.
pub fn regularize<T: Real, R: Rng + ?Sized>(
    r: &ShiftList<T>,
    params: &RegularizationParams,
    rng: &mut R,
) -> Result<ShiftList<T>> {
    if !(params.eta1 <= params.eta2) || params.eta1 < 0.0 {
        return Err(Error::Domain(format!(
            "regularization needs 0 <= eta1 <= eta2, got {} and {}",
            params.eta1, params.eta2
        )));
    }
    let eta2 = T::from_f64(params.eta2);
    let roots = r
        .roots()
        .iter()
        .map(|&ri| sample_disk(ri, eta2, rng))
        .collect();
    ShiftList::new(roots)
}

/// `‖e_n^* p(H)‖` with `p(z) = ∏(z - s_j)`, accumulated on the growing support of the row vector.
pub fn en_p_norm<T: Real>(h: &HessenbergMatrix<T>, shifts: &ShiftList<T>) -> Scaled {
    let n = h.n();
    let mut v = vec![Complex::<T>::zero(); n];
    v[n - 1] = Complex::from(T::one());
    let mut lo = n - 1;
    let mut scale = Scaled::ONE;
    let mut next = vec![Complex::<T>::zero(); n];
    for &s in shifts.roots() {
        let new_lo = lo.saturating_sub(1);
        for j in new_lo..n {
            let mut acc = Complex::<T>::zero();
            // (v H)_j = Σ_i v_i H_ij over i ≤ j + 1
            for (i, &vi) in v.iter().enumerate().take((j + 2).min(n)).skip(lo) {
                acc += vi * h.get(i, j);
            }
            next[j] = acc - v[j] * s;
        }
        lo = new_lo;
        let big = next[lo..]
            .iter()
            .map(|z| cabs(*z).to_f64())
            .fold(0.0, f64::max);
        if big == 0.0 {
            return Scaled::ZERO;
        }
        let inv = T::one() / T::from_f64(big);
        for j in lo..n {
            v[j] = next[j] * inv;
        }
        scale = scale.mul_real(T::from_f64(big));
    }
    let sq: T = v[lo..].iter().map(|z| z.norm_sqr()).sum();
    scale.mul_real(sq.sqrt())
}

/// Whether `shifts` are θ-optimal: `‖e_n^* p(H)‖ < 0.999 θ^k ψ_k(H)^k`.
pub fn optimal<T: Real>(
    h: &HessenbergMatrix<T>,
    shifts: &ShiftList<T>,
    theta: f64,
) -> Result<bool> {
    let k = shifts.degree();
    let psi_k = potential_pow(h, k)?;
    let threshold = psi_k
        .mul(Scaled::from_real(0.999f64))
        .mul(Scaled::from_real(theta).powi(k as u32));
    Ok(en_p_norm(h, shifts) < threshold)
}

/// One call of the dichotomy on an ω-unreduced `h`.
pub fn ritz_or_decouple<T: Real, R: Rng + ?Sized>(
    h: &HessenbergMatrix<T>,
    omega: f64,
    phi: f64,
    globals: &GlobalData,
    solver: &dyn SmallEigSolver<T>,
    rng: &mut R,
) -> Result<RitzOutcome<T>> {
    let k = globals.k;
    let n = h.n();
    if n <= k {
        return Err(Error::Precondition(format!(
            "dimension {n} must exceed the shift degree {k}"
        )));
    }
    if h.is_decoupled(k, omega) {
        return Err(Error::Precondition(format!(
            "input already has a bottom-{k} subdiagonal <= omega = {omega:e}"
        )));
    }
    if !(phi > 0.0 && k as f64 / phi >= 2.0) {
        return Err(Error::Precondition(format!(
            "need k/phi >= 2, got k = {k}, phi = {phi}"
        )));
    }
    let params = RegularizationParams::for_call(omega, globals.sigma, k, phi);
    let solver_values = solver.solve(&h.corner(k), params.beta / 2.0, phi / 2.0)?;
    if solver_values.len() != k {
        return Err(Error::SmallEig(format!(
            "solver returned {} values for a {k}x{k} corner",
            solver_values.len()
        )));
    }
    let ritz_values = regularize(&ShiftList::new(solver_values.clone())?, &params, rng)?;
    if optimal(h, &ritz_values, globals.theta)? {
        return Ok(RitzOutcome {
            next_h: h.clone(),
            ritz_values,
            solver_values,
            dec: false,
            culprit: None,
        });
    }
    let hit = ritz_values
        .roots()
        .par_iter()
        .map(|&r| (r, ShiftList::repeated(r, k).and_then(|p| iqr_multi(h, &p))))
        .find_first(|(_, res)| match res {
            Ok(res) => res.next_h.is_decoupled(k, omega),
            Err(_) => true,
        });
    match hit {
        Some((r, res)) => {
            let res = res?;
            Ok(RitzOutcome {
                next_h: res.next_h,
                ritz_values,
                solver_values,
                dec: true,
                culprit: Some(r),
            })
        }
        None => Err(Error::DichotomyMiss),
    }
}
