//! Brute-force reference computations in double-double for tests and diagnostics. Nothing here
//! shares code with the QR iteration under test.

mod eig;
mod matching;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

pub use eig::{eigenvectors, ref_eigs, ref_eigs_dd};
pub use matching::matched_distance;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, HessenbergMatrix, ShiftList};
use crate::numkernel::{to_c64, to_dd_c, DoubleDouble, Real};

type D = DoubleDouble;
type CD = Complex<DoubleDouble>;

fn dd_matrix<T: Real>(m: &DenseMatrix<T>) -> DenseMatrix<D> {
    m.cast()
}

/// `‖e_n^* p(H)‖` by dense row-vector products in double-double.
pub fn dense_en_p_norm<T: Real>(h: &HessenbergMatrix<T>, shifts: &ShiftList<T>) -> DoubleDouble {
    let m = dd_matrix(h.as_dense());
    let n = m.n();
    let mut v = vec![CD::zero(); n];
    v[n - 1] = CD::one();
    for &s in shifts.roots() {
        let s = to_dd_c(s);
        v = (0..n)
            .map(|j| (0..n).fold(CD::zero(), |acc, i| acc + v[i] * m[(i, j)]) - v[j] * s)
            .collect();
    }
    v.iter().map(|z| z.norm_sqr()).sum::<D>().sqrt()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting in double-double.
pub(crate) fn lu_solve(a: &DenseMatrix<D>, b: &[CD]) -> Result<Vec<CD>> {
    let n = a.n();
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let mut m: Vec<Vec<CD>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .norm_sqr()
                    .partial_cmp(&m[j][col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        if m[piv][col].norm_sqr().sqrt().to_f64() <= 1e-30 * scale {
            return Err(Error::Singular(format!(
                "pivot {col} vanishes at oracle precision"
            )));
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let t = m[col][j];
                m[i][j] -= f * t;
            }
            let t = x[col];
            x[i] -= f * t;
        }
    }
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(x[i], |acc, j| acc - m[i][j] * x[j]);
        x[i] = s / m[i][i];
    }
    Ok(x)
}

/// `τ_p(H)^m = ‖e_n^* p(H)^{-1}‖^{-1}` from `m` dense solves.
pub fn resolvent_tau<T: Real>(h: &HessenbergMatrix<T>, shifts: &ShiftList<T>) -> Result<f64> {
    let m = dd_matrix(h.as_dense());
    let n = m.n();
    let mut x = vec![CD::zero(); n];
    x[n - 1] = CD::one();
    for &s in shifts.roots() {
        // y^* (H - s) = x^*  ⇔  (H - s)^* y = x
        let a = m.shift_diag(to_dd_c(s)).adjoint();
        x = lu_solve(&a, &x)?;
    }
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<D>().sqrt();
    Ok(1.0 / norm.to_f64())
}

/// Distribution of `Z_H`: eigenvalues with weights `|e_n^* V e_i|² / ‖e_n^* V‖²`.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    pub eigenvalues: Vec<Complex<f64>>,
    pub weights: Vec<f64>,
}

impl SpectralMeasure {
    pub fn expect(&self, f: impl Fn(Complex<f64>) -> f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}

/// Spectral measure with unit-norm eigenvector columns.
pub fn spectral_measure<T: Real>(h: &HessenbergMatrix<T>) -> Result<SpectralMeasure> {
    let m = dd_matrix(h.as_dense());
    let n = m.n();
    let lam = ref_eigs_dd(&m)?;
    let v = eigenvectors(&m, &lam)?;
    let last: Vec<f64> = (0..n).map(|i| v[(n - 1, i)].norm_sqr().to_f64()).collect();
    let total: f64 = last.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Defective(
            "e_n is orthogonal to every eigenvector".into(),
        ));
    }
    Ok(SpectralMeasure {
        eigenvalues: lam.into_iter().map(to_c64).collect(),
        weights: last.iter().map(|w| w / total).collect(),
    })
}

/// `E|Z_H - r|^{-k} ≥ α^{-k} E|p(Z_H)|^{-1}` with `p` the monic polynomial with roots `ritz`.
pub fn promising_check<T: Real>(
    h: &HessenbergMatrix<T>,
    r: Complex<T>,
    ritz: &ShiftList<T>,
    alpha: f64,
) -> Result<bool> {
    let mu = spectral_measure(h)?;
    Ok(promising_check_with(
        &mu,
        to_c64(r),
        &ritz.roots().iter().map(|&z| to_c64(z)).collect::<Vec<_>>(),
        alpha,
    ))
}

pub fn promising_check_with(
    mu: &SpectralMeasure,
    r: Complex<f64>,
    ritz: &[Complex<f64>],
    alpha: f64,
) -> bool {
    let k = ritz.len() as i32;
    let lhs = mu.expect(|z| (z - r).norm().powi(-k));
    let rhs = mu.expect(|z| {
        ritz.iter()
            .map(|&s| (z - s).norm())
            .product::<f64>()
            .recip()
    }) / alpha.powi(k);
    lhs >= rhs
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionReport {
    /// `‖V‖‖V^{-1}‖` for unit eigenvector columns, an upper bound on `κ_V`.
    pub kappa_v: f64,
    pub gap: f64,
    pub norm: f64,
}

fn to_nalgebra(m: &DenseMatrix<D>) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.n(), m.n(), |i, j| to_c64(m[(i, j)]))
}

pub fn spectral_norm<T: Real>(m: &DenseMatrix<T>) -> f64 {
    let a = to_nalgebra(&dd_matrix(m));
    a.singular_values().max()
}

pub fn min_gap(lam: &[Complex<f64>]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..lam.len() {
        for j in 0..i {
            gap = gap.min((lam[i] - lam[j]).norm());
        }
    }
    gap
}

pub fn condition_report<T: Real>(m: &DenseMatrix<T>) -> Result<ConditionReport> {
    let md = dd_matrix(m);
    let lam = ref_eigs_dd(&md)?;
    let v = eigenvectors(&md, &lam)?;
    let sv = to_nalgebra(&v).singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 0.0) || !(smax / smin).is_finite() {
        return Err(Error::Defective(
            "eigenvector matrix is numerically singular".into(),
        ));
    }
    let lam64: Vec<_> = lam.iter().map(|&z| to_c64(z)).collect();
    Ok(ConditionReport {
        kappa_v: (smax / smin).max(1.0),
        gap: min_gap(&lam64),
        norm: spectral_norm(m),
    })
}

/// `p(H)` as a dense matrix in double-double.
pub fn dense_poly<T: Real>(h: &HessenbergMatrix<T>, shifts: &ShiftList<T>) -> DenseMatrix<D> {
    let m = dd_matrix(h.as_dense());
    let mut p = DenseMatrix::<D>::identity(m.n());
    for &s in shifts.roots() {
        p = p.matmul(&m.shift_diag(to_dd_c(s)));
    }
    p
}

/// Exact-arithmetic reference for a multishift step: `Q^* H Q` with `p(H) = QR`, `R_ii > 0`.
pub fn iqr_exact<T: Real>(
    h: &HessenbergMatrix<T>,
    shifts: &ShiftList<T>,
) -> Result<(DenseMatrix<D>, DenseMatrix<D>)> {
    let p = dense_poly(h, shifts);
    let n = p.n();
    // modified Gram–Schmidt twice, column by column
    let mut q = DenseMatrix::<D>::zeros(n);
    let mut r = DenseMatrix::<D>::zeros(n);
    for j in 0..n {
        let mut v: Vec<CD> = (0..n).map(|i| p[(i, j)]).collect();
        for _ in 0..2 {
            for l in 0..j {
                let dot = (0..n).fold(CD::zero(), |acc, i| acc + q[(i, l)].conj() * v[i]);
                r[(l, j)] += dot;
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi -= q[(i, l)] * dot;
                }
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<D>().sqrt();
        if nv.to_f64() <= 1e-28 * p.frobenius() {
            return Err(Error::Singular(format!(
                "p(H) is rank deficient at column {j}"
            )));
        }
        r[(j, j)] = Complex::from(nv);
        for (i, vi) in v.iter().enumerate() {
            q[(i, j)] = *vi / Complex::from(nv);
        }
    }
    let m = dd_matrix(h.as_dense());
    Ok((q.adjoint().matmul(&m).matmul(&q), q))
}
