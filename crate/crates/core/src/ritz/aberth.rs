//! Default small eigenvalue solver: Hessenberg reduction, Hyman's determinant
//! recurrence and Ehrlich–Aberth iteration, all in double-double, followed by
//! Weierstrass inclusion disks as an a posteriori forward-error certificate.

use std::f64::consts::TAU;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::SmallEigSolver;
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, HessenbergMatrix};
use crate::numkernel::{cabs, from_dd_c, DoubleDouble, Real};
use crate::reduce::reduce_to_hessenberg;

type D = DoubleDouble;
type CD = Complex<DoubleDouble>;

#[derive(Clone, Debug)]
pub struct AberthSolver {
    pub max_iter: usize,
}

impl Default for AberthSolver {
    fn default() -> Self {
        Self { max_iter: 500 }
    }
}

/// An eigenvalue estimate with a certified bound on its distance to a matched eigenvalue.
#[derive(Clone, Copy, Debug)]
pub struct Certified {
    pub value: CD,
    pub radius: f64,
}

impl<T: Real> SmallEigSolver<T> for AberthSolver {
    fn solve(&self, m: &DenseMatrix<T>, beta: f64, _phi: f64) -> Result<Vec<Complex<T>>> {
        if !m.is_finite() {
            return Err(Error::NonFinite("small eigenproblem"));
        }
        let certs = certified_eigenvalues(&m.cast::<D>(), self.max_iter)?;
        // rounding the double-double values to T costs up to one unit in the last place
        let floor = 8.0 * T::unit_roundoff() * m.frobenius();
        let tol = beta.max(floor);
        let worst = certs.iter().map(|c| c.radius).fold(0.0, f64::max);
        if !(worst <= tol) {
            return Err(Error::SmallEig(format!(
                "certified radius {worst:.3e} exceeds {tol:.3e}"
            )));
        }
        Ok(certs.iter().map(|c| from_dd_c(c.value)).collect())
    }
}

/// `(f, f')` with `det(zI - B) = -f(z) · ∏ b_{i,i-1}`, by back substitution in `(B - z) x = f e_1`.
fn hyman(b: &DenseMatrix<D>, z: CD) -> (CD, CD) {
    let m = b.n();
    let mut x = vec![CD::zero(); m];
    let mut xp = vec![CD::zero(); m];
    x[m - 1] = CD::one();
    let entry = |i: usize, j: usize| if i == j { b[(i, j)] - z } else { b[(i, j)] };
    for i in (1..m).rev() {
        let mut s = CD::zero();
        let mut sp = -x[i];
        for j in i..m {
            let e = entry(i, j);
            s += e * x[j];
            sp += e * xp[j];
        }
        let d = b[(i, i - 1)];
        x[i - 1] = -s / d;
        xp[i - 1] = -sp / d;
    }
    let mut f = CD::zero();
    let mut fp = -x[0];
    for j in 0..m {
        let e = entry(0, j);
        f += e * x[j];
        fp += e * xp[j];
    }
    (f, fp)
}

/// `det(zI - B)` for an unreduced Hessenberg block.
pub fn hyman_det(b: &DenseMatrix<D>, z: CD) -> CD {
    let (f, _) = hyman(b, z);
    let prod = (1..b.n()).fold(CD::one(), |p, i| p * b[(i, i - 1)]);
    -f * prod
}

fn cis(theta: f64) -> CD {
    let (s, c) = theta.sin_cos();
    Complex::new(D::from_f64(c), D::from_f64(s))
}

fn aberth_block(b: &DenseMatrix<D>, max_iter: usize) -> Vec<CD> {
    let m = b.n();
    let trace = (0..m).fold(CD::zero(), |s, i| s + b[(i, i)]);
    let center = trace / Complex::from(D::from_f64(m as f64));
    let spread = b.shift_diag(center).frobenius().max(f64::MIN_POSITIVE);
    let scale = b.frobenius().max(f64::MIN_POSITIVE);
    let r0 = D::from_f64(0.5 * spread);
    let mut z: Vec<CD> = (0..m)
        .map(|i| center + cis(TAU * i as f64 / m as f64 + 0.5) * Complex::from(r0))
        .collect();
    let tiny = 1e-30 * scale;
    let mut done = vec![false; m];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let (f, fp) = hyman(b, z[i]);
            if f.is_zero() {
                done[i] = true;
                continue;
            }
            let n = if fp.is_zero() { f } else { f / fp };
            let s = (0..m)
                .filter(|&j| j != i)
                .fold(CD::zero(), |s, j| s + CD::one() / (z[i] - z[j]));
            let w = n / (CD::one() - n * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[i] -= w;
            if cabs(w).to_f64() <= tiny.max(1e-31 * cabs(z[i]).to_f64()) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    // Newton polish, accepted only while it stays inside the root's own basin
    for i in 0..m {
        for _ in 0..2 {
            let (f, fp) = hyman(b, z[i]);
            if f.is_zero() || fp.is_zero() {
                break;
            }
            let step = f / fp;
            let sep = (0..m)
                .filter(|&j| j != i)
                .map(|j| cabs(z[i] - z[j]).to_f64())
                .fold(f64::INFINITY, f64::min);
            if cabs(step).to_f64() < 0.25 * sep {
                z[i] -= step;
            }
        }
    }
    z
}

/// Inclusion radii: each disk `D(z_i, m|W_i|)` with Weierstrass correction `W_i`; a connected
/// component of `c` disks holds exactly `c` eigenvalues, so members of a cluster get its total width.
fn certify(b: &DenseMatrix<D>, z: &[CD]) -> Vec<f64> {
    let m = z.len();
    let scale = b.frobenius().max(f64::MIN_POSITIVE);
    let slack = 64.0 * D::EPSILON * scale;
    let rho: Vec<f64> = (0..m)
        .map(|i| {
            let p = hyman_det(b, z[i]);
            let den = (0..m)
                .filter(|&j| j != i)
                .fold(CD::one(), |d, j| d * (z[i] - z[j]));
            let w = if m == 1 { p } else { p / den };
            let r = m as f64 * cabs(w).to_f64() + slack;
            if r.is_finite() {
                r
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut comp: Vec<usize> = (0..m).collect();
    fn root(c: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for i in 0..m {
        for j in i + 1..m {
            if cabs(z[i] - z[j]).to_f64() <= rho[i] + rho[j] {
                let (a, b) = (root(&mut comp, i), root(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut width = vec![0.0; m];
    let mut size = vec![0usize; m];
    for i in 0..m {
        let r = root(&mut comp, i);
        width[r] += 2.0 * rho[i];
        size[r] += 1;
    }
    (0..m)
        .map(|i| {
            let r = root(&mut comp, i);
            if size[r] == 1 {
                rho[i]
            } else {
                width[r]
            }
        })
        .collect()
}

/// Eigenvalues of `m` with certified radii, splitting at negligible subdiagonals first.
pub fn certified_eigenvalues(m: &DenseMatrix<D>, max_iter: usize) -> Result<Vec<Certified>> {
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let h: HessenbergMatrix<D> = reduce_to_hessenberg(m);
    let scale = h.frobenius();
    let mut cuts = vec![0];
    for i in 1..n {
        let s = cabs(h.sub(i)).to_f64();
        let local = cabs(h.get(i, i)).to_f64() + cabs(h.get(i - 1, i - 1)).to_f64();
        if s == 0.0 || s <= 1e-31 * local.max(1e-3 * scale) {
            cuts.push(i);
        }
    }
    cuts.push(n);
    let mut out = Vec::with_capacity(n);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo == 1 {
            out.push(Certified {
                value: h.get(lo, lo),
                radius: 0.0,
            });
            continue;
        }
        let b = h.block(lo, hi).into_dense();
        let z = aberth_block(&b, max_iter);
        let radii = certify(&b, &z);
        out.extend(
            z.into_iter()
                .zip(radii)
                .map(|(value, radius)| Certified { value, radius }),
        );
    }
    if out
        .iter()
        .any(|c| !(c.value.re.is_finite() && c.value.im.is_finite()))
    {
        return Err(Error::NoConvergence(
            "Aberth iteration produced non-finite roots".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;

    fn solve(rows: &[&[f64]], beta: f64) -> Result<Vec<Complex<f64>>> {
        let m = DenseMatrix::<f64>::from_real_rows(rows).unwrap();
        AberthSolver::default().solve(&m, beta, 0.01)
    }

    fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn diagonal_and_identity() {
        let v = sorted(solve(&[&[2.0, 0.0], &[0.0, -1.0]], 1e-12).unwrap());
        assert_eq!(v, vec![c(-1.0, 0.0), c(2.0, 0.0)]);
        let v = solve(&[&[1.0, 0.0], &[0.0, 1.0]], 1e-12).unwrap();
        assert_eq!(v, vec![c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn companion_of_cube_roots() {
        // companion matrix of z^3 - 1
        let v = solve(
            &[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]],
            1e-14,
        )
        .unwrap();
        for z in &v {
            let z3 = z * z * z;
            assert!((z3 - c(1.0, 0.0)).norm() < 1e-15);
        }
        let re_sum: f64 = v.iter().map(|z| z.re).sum();
        assert!(re_sum.abs() < 1e-15);
    }

    #[test]
    fn double_double_roots_are_accurate() {
        let m = DenseMatrix::<D>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let certs = certified_eigenvalues(&m, 500).unwrap();
        for cert in certs {
            let err = (cabs(cert.value).to_f64() - 1.0).abs();
            assert!(err < 1e-28 && cert.radius < 1e-25, "{err} {}", cert.radius);
        }
    }

    #[test]
    fn jordan_block_certifies_as_a_cluster() {
        // [[1, 1], [1e-20, 1]] has eigenvalues 1 ± 1e-10
        let v = solve(&[&[1.0, 1.0], &[1e-20, 1.0]], 1e-9).unwrap();
        for z in v {
            assert!((z - c(1.0, 0.0)).norm() < 2e-10);
        }
    }

    #[test]
    fn uncertifiable_request_is_an_error() {
        // clustered pair can only be resolved to ~1e-10 once beta is far below it... while the
        // double-double solve is exact here, a beta below the binary64 floor is clamped, not refused
        let v = solve(&[&[1.0, 1.0], &[0.0, 1.0 + 1e-12]], 1e-40);
        assert!(v.is_ok());
    }
}
