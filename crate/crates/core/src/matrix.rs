//! Dense square and upper Hessenberg complex matrices, and shift lists.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numkernel::{cabs, cabs_dd, cast_c, cfinite, DoubleDouble, Real};

/// Row-major dense `n × n` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T: Real> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex::from(T::one())
            } else {
                Complex::zero()
            }
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(
                "rows of unequal length or non-square".into(),
            ));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| Complex::new(T::from_f64(x), T::zero()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<T>] {
        let n = self.n;
        &mut self.data[i * n..(i + 1) * n]
    }

    /// Mutable rows `i` and `i + 1`.
    pub fn row_pair_mut(&mut self, i: usize) -> (&mut [Complex<T>], &mut [Complex<T>]) {
        let n = self.n;
        let (a, b) = self.data[i * n..(i + 2) * n].split_at_mut(n);
        (a, b)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| cfinite(*z))
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|z| {
                let a = cabs_dd(*z);
                a * a
            })
            .sum::<DoubleDouble>()
            .sqrt()
            .to_f64()
    }

    pub fn cast<U: Real>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|z| cast_c(*z)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * o[(l, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] - o[(i, j)])
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] + o[(i, j)])
    }

    pub fn shift_diag(&self, s: Complex<T>) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= s;
        }
        m
    }

    pub fn submatrix(&self, lo: usize, hi: usize) -> Self {
        Self::from_fn(hi - lo, |i, j| self[(lo + i, lo + j)])
    }

    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.n).all(|i| (0..i.saturating_sub(1)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }
}

impl<T: Real> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Dense upper Hessenberg matrix: entries below the first subdiagonal are exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct HessenbergMatrix<T: Real> {
    m: DenseMatrix<T>,
}

impl<T: Real> HessenbergMatrix<T> {
    pub fn from_dense(m: DenseMatrix<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix entries"));
        }
        if !m.is_upper_hessenberg() {
            return Err(Error::Precondition("matrix is not upper Hessenberg".into()));
        }
        Ok(Self { m })
    }

    /// Takes the Hessenberg part of `m`, discarding entries below the subdiagonal.
    pub fn from_dense_truncated(mut m: DenseMatrix<T>) -> Self {
        for i in 2..m.n() {
            for j in 0..i - 1 {
                m[(i, j)] = Complex::zero();
            }
        }
        Self { m }
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        Self::from_dense(DenseMatrix::from_rows(rows)?)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_dense(DenseMatrix::from_real_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.m[(i, j)]
    }

    /// Writes `(i, j)`; positions below the subdiagonal are structural and refused.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        assert!(i <= j + 1, "write below the subdiagonal at ({i}, {j})");
        self.m[(i, j)] = z;
    }

    /// `h_{i, i-1}` for `1 <= i < n`.
    #[inline]
    pub fn sub(&self, i: usize) -> Complex<T> {
        self.m[(i, i - 1)]
    }

    pub fn as_dense(&self) -> &DenseMatrix<T> {
        &self.m
    }

    pub fn into_dense(self) -> DenseMatrix<T> {
        self.m
    }

    pub fn frobenius(&self) -> f64 {
        self.m.frobenius()
    }

    pub fn cast<U: Real>(&self) -> HessenbergMatrix<U> {
        HessenbergMatrix { m: self.m.cast() }
    }

    /// Bottom-right `k × k` corner `H_(k)`.
    pub fn corner(&self, k: usize) -> DenseMatrix<T> {
        let n = self.n();
        self.m.submatrix(n - k, n)
    }

    /// Diagonal block on rows and columns `lo..hi`.
    pub fn block(&self, lo: usize, hi: usize) -> Self {
        Self {
            m: self.m.submatrix(lo, hi),
        }
    }

    /// Moduli of the bottom `k` subdiagonal entries, top to bottom.
    pub fn bottom_subdiagonals(&self, k: usize) -> Vec<T> {
        let n = self.n();
        (n - k..n).map(|i| cabs(self.sub(i))).collect()
    }

    /// Some bottom-`k` subdiagonal modulus is at most `omega`.
    pub fn is_decoupled(&self, k: usize, omega: f64) -> bool {
        let k = k.min(self.n().saturating_sub(1));
        self.bottom_subdiagonals(k)
            .iter()
            .any(|a| a.to_f64() <= omega)
    }
}

/// Roots `s_1, …, s_m` of a monic polynomial, applied in order.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftList<T: Real> {
    roots: Vec<Complex<T>>,
}

impl<T: Real> ShiftList<T> {
    pub fn new(roots: Vec<Complex<T>>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::Domain("empty shift list".into()));
        }
        if !roots.iter().all(|z| cfinite(*z)) {
            return Err(Error::NonFinite("shift list"));
        }
        Ok(Self { roots })
    }

    pub fn single(s: Complex<T>) -> Result<Self> {
        Self::new(vec![s])
    }

    /// `(z - s)^times`.
    pub fn repeated(s: Complex<T>, times: usize) -> Result<Self> {
        Self::new(vec![s; times])
    }

    /// Each root repeated `times` consecutively.
    pub fn power(&self, times: usize) -> Self {
        Self {
            roots: self
                .roots
                .iter()
                .flat_map(|&r| std::iter::repeat_n(r, times))
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Complex<T>] {
        &self.roots
    }

    pub fn into_roots(self) -> Vec<Complex<T>> {
        self.roots
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots
            .iter()
            .map(|z| cabs(*z).to_f64())
            .fold(0.0, f64::max)
    }
}
