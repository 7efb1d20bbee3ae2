//! Shifted QR steps on Hessenberg matrices through Givens rotations, the `CompTau`
//! product of trailing `R` entries, and the potential `ψ_k`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, HessenbergMatrix, ShiftList};
use crate::numkernel::{cabs, cabs_dd, phase, GivensRotation, Real, Scaled};

#[derive(Clone, Debug)]
pub struct IqrResult<T: Real> {
    pub next_h: HessenbergMatrix<T>,
    /// `(R̂_ℓ)_{nn}` of each degree-1 step.
    pub r_nn_per_step: Vec<T>,
}

/// One degree-1 step with everything needed to rebuild `Q̂` outside production code.
///
/// `Q̂ = G_1^* ⋯ G_{n-1}^* · diag(1, …, 1, last_phase)` and `H - s ≈ Q̂ R̂`.
#[derive(Clone, Debug)]
pub struct IqrFactors<T: Real> {
    pub next_h: HessenbergMatrix<T>,
    pub rotations: Vec<GivensRotation<T>>,
    pub last_phase: Complex<T>,
    pub r: DenseMatrix<T>,
}

fn check(h: &HessenbergMatrix<impl Real>) -> Result<()> {
    if h.n() < 2 {
        return Err(Error::Dimension(format!(
            "QR step needs n >= 2, got {}",
            h.n()
        )));
    }
    Ok(())
}

fn step<T: Real>(h: &HessenbergMatrix<T>, s: Complex<T>, keep: bool) -> (IqrFactors<T>, T) {
    let n = h.n();
    let mut r = h.as_dense().shift_diag(s);
    let mut rotations = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let g = GivensRotation::for_pair(r[(i, i)], r[(i + 1, i)]);
        {
            let (top, bot) = r.row_pair_mut(i);
            crate::numkernel::apply_givens_left(&g, &mut top[i + 1..], &mut bot[i + 1..]);
        }
        if !g.is_identity() {
            r[(i, i)] = Complex::from(g.norm);
        }
        r[(i + 1, i)] = Complex::new(T::zero(), T::zero());
        rotations.push(g);
    }
    // last diagonal entry made real nonnegative by a trailing phase
    let last_phase = phase(r[(n - 1, n - 1)]);
    let r_nn = cabs(r[(n - 1, n - 1)]);
    r[(n - 1, n - 1)] = Complex::from(r_nn);

    let mut out = r.clone();
    for (i, g) in rotations.iter().enumerate() {
        if g.is_identity() {
            continue;
        }
        for row in 0..=(i + 1) {
            let (a, b) = g.rotate_adjoint_right(out[(row, i)], out[(row, i + 1)]);
            out[(row, i)] = a;
            out[(row, i + 1)] = b;
        }
    }
    for row in 0..n {
        out[(row, n - 1)] *= last_phase;
    }
    for i in 0..n {
        out[(i, i)] += s;
    }
    let next_h = HessenbergMatrix::from_dense_truncated(out);
    let r = if keep { r } else { DenseMatrix::zeros(0) };
    (
        IqrFactors {
            next_h,
            rotations,
            last_phase,
            r,
        },
        r_nn,
    )
}

pub fn iqr_single<T: Real>(h: &HessenbergMatrix<T>, s: Complex<T>) -> Result<IqrResult<T>> {
    check(h)?;
    let (f, r_nn) = step(h, s, false);
    Ok(IqrResult {
        next_h: f.next_h,
        r_nn_per_step: vec![r_nn],
    })
}

/// As [`iqr_single`], also returning the rotations, trailing phase and `R̂`.
pub fn iqr_single_factors<T: Real>(
    h: &HessenbergMatrix<T>,
    s: Complex<T>,
) -> Result<IqrFactors<T>> {
    check(h)?;
    Ok(step(h, s, true).0)
}

/// Degree-1 steps composed in root order.
pub fn iqr_multi<T: Real>(h: &HessenbergMatrix<T>, shifts: &ShiftList<T>) -> Result<IqrResult<T>> {
    check(h)?;
    let mut cur = h.clone();
    let mut r_nn_per_step = Vec::with_capacity(shifts.degree());
    for &s in shifts.roots() {
        let (f, r_nn) = step(&cur, s, false);
        cur = f.next_h;
        r_nn_per_step.push(r_nn);
    }
    Ok(IqrResult {
        next_h: cur,
        r_nn_per_step,
    })
}

/// `τ̂^m = ∏ (R̂_ℓ)_{nn}` without leaving the representable range.
pub fn comp_tau_scaled<T: Real>(h: &HessenbergMatrix<T>, shifts: &ShiftList<T>) -> Result<Scaled> {
    let res = iqr_multi(h, shifts)?;
    Ok(res
        .r_nn_per_step
        .iter()
        .fold(Scaled::ONE, |acc, &r| acc.mul_real(r)))
}

/// `τ̂^m`, an approximation of `‖e_n^* p(H)^{-1}‖^{-1}`.
pub fn comp_tau<T: Real>(h: &HessenbergMatrix<T>, shifts: &ShiftList<T>) -> Result<T> {
    Ok(comp_tau_scaled(h, shifts)?.to_real())
}

/// `ψ_k(H)^k`: product of the bottom `k` subdiagonal moduli, accumulated in double-double.
pub fn potential_pow<T: Real>(h: &HessenbergMatrix<T>, k: usize) -> Result<Scaled> {
    let n = h.n();
    if k == 0 || n <= k {
        return Err(Error::Dimension(format!(
            "potential of order {k} needs n > k, got n = {n}"
        )));
    }
    Ok((n - k..n).fold(Scaled::ONE, |acc, i| {
        acc.mul(Scaled::from_dd(cabs_dd(h.sub(i))))
    }))
}

/// Relative accuracy of `ψ̂_k`.
pub fn potential_tolerance(k: usize) -> f64 {
    1.0 - 0.999f64.powf(1.0 / k as f64)
}

/// `ψ̂_k(H)`: k-th root of the exact bottom-`k` subdiagonal product.
pub fn potential<T: Real>(h: &HessenbergMatrix<T>, k: usize) -> Result<T> {
    let p = potential_pow(h, k)?;
    p.kth_root(k as u32, potential_tolerance(k))
}
