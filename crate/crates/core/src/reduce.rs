//! Householder reduction to upper Hessenberg form.

use num_complex::Complex;
use num_traits::Zero;

use crate::matrix::{DenseMatrix, HessenbergMatrix};
use crate::numkernel::{cabs, phase, Real};

fn reduce<T: Real>(m: &DenseMatrix<T>, mut q: Option<&mut DenseMatrix<T>>) -> HessenbergMatrix<T> {
    let n = m.n();
    let mut a = m.clone();
    let two = T::from_f64(2.0);
    for j in 0..n.saturating_sub(2) {
        let tail: T = (j + 2..n).map(|i| a[(i, j)].norm_sqr()).sum();
        if tail == T::zero() {
            continue;
        }
        let alpha = a[(j + 1, j)];
        let xnorm = cabs(alpha).hypot(tail.sqrt());
        let beta = -phase(alpha) * Complex::from(xnorm);
        let mut v: Vec<Complex<T>> = (j + 1..n).map(|i| a[(i, j)]).collect();
        v[0] = alpha - beta;
        let vv: T = v.iter().map(|z| z.norm_sqr()).sum();
        let f = Complex::from(two / vv);
        for c in j..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::<T>::zero(), |s, (l, vl)| {
                    s + vl.conj() * a[(j + 1 + l, c)]
                });
            let d = dot * f;
            for (l, vl) in v.iter().enumerate() {
                a[(j + 1 + l, c)] -= *vl * d;
            }
        }
        for r in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::<T>::zero(), |s, (l, vl)| {
                    s + a[(r, j + 1 + l)] * *vl
                });
            let d = dot * f;
            for (l, vl) in v.iter().enumerate() {
                a[(r, j + 1 + l)] -= d * vl.conj();
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for r in 0..n {
                let dot = v
                    .iter()
                    .enumerate()
                    .fold(Complex::<T>::zero(), |s, (l, vl)| {
                        s + q[(r, j + 1 + l)] * *vl
                    });
                let d = dot * f;
                for (l, vl) in v.iter().enumerate() {
                    q[(r, j + 1 + l)] -= d * vl.conj();
                }
            }
        }
        a[(j + 1, j)] = beta;
        for i in j + 2..n {
            a[(i, j)] = Complex::zero();
        }
    }
    HessenbergMatrix::from_dense_truncated(a)
}

/// `Q^* M Q` in upper Hessenberg form; columns already in form are left untouched.
pub fn reduce_to_hessenberg<T: Real>(m: &DenseMatrix<T>) -> HessenbergMatrix<T> {
    reduce(m, None)
}

/// As [`reduce_to_hessenberg`], also returning the unitary `Q`.
pub fn reduce_to_hessenberg_with_q<T: Real>(
    m: &DenseMatrix<T>,
) -> (HessenbergMatrix<T>, DenseMatrix<T>) {
    let mut q = DenseMatrix::identity(m.n());
    let h = reduce(m, Some(&mut q));
    (h, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn similarity_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 9;
        let m = DenseMatrix::<f64>::from_fn(n, |_, _| {
            Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let (h, q) = reduce_to_hessenberg_with_q(&m);
        assert!(h.as_dense().is_upper_hessenberg());
        let back = q.matmul(h.as_dense()).matmul(&q.adjoint());
        assert!(back.sub(&m).frobenius() < 1e-13 * m.frobenius());
        assert!(
            q.adjoint()
                .matmul(&q)
                .sub(&DenseMatrix::identity(n))
                .frobenius()
                < 1e-14
        );
    }

    #[test]
    fn hessenberg_input_is_untouched() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = DenseMatrix::<f64>::from_fn(6, |i, j| {
            if i > j + 1 {
                Complex::zero()
            } else {
                Complex::new(rng.random(), rng.random())
            }
        });
        assert_eq!(reduce_to_hessenberg(&m).as_dense(), &m);
    }
}
