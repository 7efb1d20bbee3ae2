//! Reference eigenvalues by explicitly shifted QR with Wilkinson shifts, eigenvectors by inverse
//! iteration, both in double-double.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{dd_matrix, lu_solve, CD, D};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::numkernel::{to_c64, Real};
use crate::reduce::reduce_to_hessenberg;
use crate::ritz::hyman_det;

fn abs(z: CD) -> f64 {
    z.norm_sqr().sqrt().to_f64()
}

fn wilkinson(a: CD, b: CD, c: CD, d: CD) -> CD {
    // eigenvalue of [[a, b], [c, d]] closer to d
    let half = Complex::from(D::from_f64(0.5));
    let tr = (a + d) * half;
    let disc = ((a - d) * half) * ((a - d) * half) + b * c;
    let sq = disc.sqrt_dd();
    let (l1, l2) = (tr + sq, tr - sq);
    if abs(l1 - d) < abs(l2 - d) {
        l1
    } else {
        l2
    }
}

trait SqrtDd {
    fn sqrt_dd(self) -> Self;
}

impl SqrtDd for CD {
    fn sqrt_dd(self) -> Self {
        let r = self.norm_sqr().sqrt();
        if r.is_zero() {
            return CD::zero();
        }
        let half = D::from_f64(0.5);
        let re = ((r + self.re) * half).sqrt();
        let im_mag = ((r - self.re) * half).sqrt();
        let im = if self.im < D::zero() { -im_mag } else { im_mag };
        Complex::new(re, im)
    }
}

/// Eigenvalues of a double-double matrix.
pub fn ref_eigs_dd(m: &DenseMatrix<D>) -> Result<Vec<CD>> {
    let n = m.n();
    let mut a = reduce_to_hessenberg(m).into_dense();
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut its = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        if hi == 1 {
            out.push(a[(0, 0)]);
            break;
        }
        let mut lo = hi - 1;
        while lo > 0 {
            let s = abs(a[(lo, lo - 1)]);
            let local = abs(a[(lo, lo)]) + abs(a[(lo - 1, lo - 1)]);
            if s <= 1e-32 * local || s <= 1e-34 * scale {
                a[(lo, lo - 1)] = CD::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            out.push(a[(hi - 1, hi - 1)]);
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > 200 * n {
            return Err(Error::NoConvergence(format!(
                "reference QR stalled with {hi} eigenvalues left"
            )));
        }
        let e = hi - 1;
        let shift = if its % 12 == 0 {
            a[(e, e)]
                + Complex::new(D::from_f64(0.75), D::from_f64(0.43))
                    * Complex::from(D::from_f64(abs(a[(e, e - 1)])))
        } else {
            wilkinson(a[(e - 1, e - 1)], a[(e - 1, e)], a[(e, e - 1)], a[(e, e)])
        };
        qr_step(&mut a, lo, hi, shift);
    }
    out.reverse();
    Ok(out)
}

/// One explicit shifted QR sweep `A − s = QR, A ← RQ + s` on the window `lo..hi`.
fn qr_step(a: &mut DenseMatrix<D>, lo: usize, hi: usize, s: CD) {
    for i in lo..hi {
        a[(i, i)] -= s;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for i in lo..hi - 1 {
        let (x, y) = (a[(i, i)], a[(i + 1, i)]);
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (cs, sn) = if r.is_zero() {
            (CD::one(), CD::zero())
        } else {
            (x / Complex::from(r), y / Complex::from(r))
        };
        // [c̄ s̄; −s c] maps (x, y) to (r, 0)
        for j in i..hi {
            let (u, v) = (a[(i, j)], a[(i + 1, j)]);
            a[(i, j)] = cs.conj() * u + sn.conj() * v;
            a[(i + 1, j)] = -sn * u + cs * v;
        }
        rots.push((cs, sn));
    }
    for (off, &(cs, sn)) in rots.iter().enumerate() {
        let i = lo + off;
        for r in lo..(i + 2).min(hi) {
            let (u, v) = (a[(r, i)], a[(r, i + 1)]);
            a[(r, i)] = u * cs + v * sn;
            a[(r, i + 1)] = -u * sn.conj() + v * cs.conj();
        }
    }
    for i in lo..hi {
        a[(i, i)] += s;
    }
}

/// Eigenvalues of `m`, sorted by real then imaginary part, with a determinant residual check.
pub fn ref_eigs<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<Complex<f64>>> {
    let md = dd_matrix(m);
    let lam = ref_eigs_dd(&md)?;
    let h = reduce_to_hessenberg(&md).into_dense();
    let scale = md.frobenius().max(1.0);
    let n = md.n();
    for &z in &lam {
        if irreducible(&h) {
            let r = abs(hyman_det(&h, z));
            if r > 1e-20 * scale.powi(n as i32) {
                return Err(Error::NoConvergence(format!(
                    "residual {r:e} at {:?}",
                    to_c64(z)
                )));
            }
        }
    }
    let mut out: Vec<Complex<f64>> = lam.into_iter().map(to_c64).collect();
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(out)
}

fn irreducible(h: &DenseMatrix<D>) -> bool {
    (1..h.n()).all(|i| !h[(i, i - 1)].is_zero())
}

/// Unit right eigenvectors as columns, one per listed eigenvalue, by inverse iteration.
pub fn eigenvectors(m: &DenseMatrix<D>, lam: &[CD]) -> Result<DenseMatrix<D>> {
    let n = m.n();
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let mut v = DenseMatrix::<D>::zeros(n);
    for (col, &l) in lam.iter().enumerate() {
        let nudge = Complex::new(D::from_f64(1e-29 * scale), D::from_f64(0.7e-29 * scale));
        let a = m.shift_diag(l + nudge);
        let mut x: Vec<CD> = (0..n)
            .map(|i| {
                Complex::new(
                    D::from_f64(1.0 + 0.37 * i as f64),
                    D::from_f64(0.11 * (i * i % 7) as f64),
                )
            })
            .collect();
        for _ in 0..3 {
            x = match lu_solve(&a, &x) {
                Ok(y) => y,
                Err(_) => lu_solve(
                    &m.shift_diag(l + nudge * Complex::from(D::from_f64(1e3))),
                    &x,
                )?,
            };
            let nx = x.iter().map(|z| z.norm_sqr()).sum::<D>().sqrt();
            if !(nx.to_f64() > 0.0 && nx.to_f64().is_finite()) {
                return Err(Error::Defective(format!(
                    "inverse iteration failed for eigenvalue {col}"
                )));
            }
            for z in x.iter_mut() {
                *z /= Complex::from(nx);
            }
        }
        for (i, z) in x.into_iter().enumerate() {
            v[(i, col)] = z;
        }
    }
    Ok(v)
}
