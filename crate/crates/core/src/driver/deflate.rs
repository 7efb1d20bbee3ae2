use num_complex::Complex;
use num_traits::Zero;

use crate::matrix::HessenbergMatrix;
use crate::numkernel::{cabs, Real};

/// Zero every bottom-`k` subdiagonal entry of modulus at most `omega`.
pub fn zero_small_subdiagonals<T: Real>(
    h: &HessenbergMatrix<T>,
    omega: f64,
    k: usize,
) -> HessenbergMatrix<T> {
    let n = h.n();
    let mut out = h.clone();
    for i in n.saturating_sub(k).max(1)..n {
        if cabs(h.sub(i)).to_f64() <= omega {
            out.set(i, i - 1, Complex::zero());
        }
    }
    out
}

/// Diagonal blocks after zeroing small bottom-`k` subdiagonals, top to bottom, with their offsets.
pub fn deflate<T: Real>(
    h: &HessenbergMatrix<T>,
    omega: f64,
    k: usize,
) -> Vec<(usize, HessenbergMatrix<T>)> {
    split_at_zeros(&zero_small_subdiagonals(h, omega, k))
}

/// Diagonal blocks between exactly zero subdiagonal entries.
pub fn split_at_zeros<T: Real>(h: &HessenbergMatrix<T>) -> Vec<(usize, HessenbergMatrix<T>)> {
    let n = h.n();
    let mut cuts = vec![0];
    cuts.extend((1..n).filter(|&i| h.sub(i).is_zero()));
    cuts.push(n);
    cuts.windows(2)
        .map(|w| (w[0], h.block(w[0], w[1])))
        .collect()
}
