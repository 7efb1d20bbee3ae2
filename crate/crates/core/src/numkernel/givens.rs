use num_complex::Complex;
use num_traits::{One, Zero};

use super::{cabs, phase, Real};
use crate::error::{Error, Result};

/// Unitary `G = diag(conj(phase), phase) · [[c, s], [-conj(s), c]]` with `G x = (norm, 0)`.
///
/// The phase factor makes the produced diagonal entry real and nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GivensRotation<T: Real> {
    pub c: T,
    pub s: Complex<T>,
    pub phase: Complex<T>,
    pub norm: T,
}

impl<T: Real> GivensRotation<T> {
    pub fn identity() -> Self {
        Self {
            c: T::one(),
            s: Complex::zero(),
            phase: Complex::one(),
            norm: T::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.c == T::one() && self.s.is_zero() && self.phase.is_one()
    }

    /// Rotation for `x`, or the identity when `x` is exactly zero.
    pub fn for_pair(a: Complex<T>, b: Complex<T>) -> Self {
        let aa = cabs(a);
        let bb = cabs(b);
        let norm = aa.hypot(bb);
        if norm == T::zero() {
            return Self::identity();
        }
        let ph = phase(a);
        let c = aa / norm;
        let s = ph * b.conj() / Complex::from(norm);
        Self {
            c,
            s,
            phase: ph,
            norm,
        }
    }

    /// `G (x, y)`.
    #[inline]
    pub fn rotate(&self, x: Complex<T>, y: Complex<T>) -> (Complex<T>, Complex<T>) {
        let c = Complex::from(self.c);
        (
            self.phase.conj() * (c * x + self.s * y),
            self.phase * (c * y - self.s.conj() * x),
        )
    }

    /// `(u, v) G*` for a row vector.
    #[inline]
    pub fn rotate_adjoint_right(&self, u: Complex<T>, v: Complex<T>) -> (Complex<T>, Complex<T>) {
        let c = Complex::from(self.c);
        (
            self.phase * (c * u + self.s.conj() * v),
            self.phase.conj() * (c * v - self.s * u),
        )
    }
}

pub fn make_givens<T: Real>(x: (Complex<T>, Complex<T>)) -> Result<GivensRotation<T>> {
    if !(super::cfinite(x.0) && super::cfinite(x.1)) {
        return Err(Error::NonFinite("givens input"));
    }
    if x.0.is_zero() && x.1.is_zero() {
        return Err(Error::Degenerate("givens rotation of the zero vector"));
    }
    Ok(GivensRotation::for_pair(x.0, x.1))
}

/// Rows `(top, bottom) <- G (top, bottom)`.
pub fn apply_givens_left<T: Real>(
    g: &GivensRotation<T>,
    top: &mut [Complex<T>],
    bottom: &mut [Complex<T>],
) {
    debug_assert_eq!(top.len(), bottom.len());
    if g.is_identity() {
        return;
    }
    for (x, y) in top.iter_mut().zip(bottom.iter_mut()) {
        let (a, b) = g.rotate(*x, *y);
        *x = a;
        *y = b;
    }
}

/// Columns `(left, right) <- (left, right) G*`.
pub fn apply_givens_right<T: Real>(
    g: &GivensRotation<T>,
    left: &mut [Complex<T>],
    right: &mut [Complex<T>],
) {
    debug_assert_eq!(left.len(), right.len());
    if g.is_identity() {
        return;
    }
    for (u, v) in left.iter_mut().zip(right.iter_mut()) {
        let (a, b) = g.rotate_adjoint_right(*u, *v);
        *u = a;
        *v = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn unit_vector_gives_identity() {
        let g = make_givens((c::<f64>(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert!(g.is_identity());
        assert_eq!(g.norm, 1.0);
    }

    #[test]
    fn second_unit_vector_gives_permutation() {
        let g = make_givens((c::<f64>(0.0, 0.0), c(1.0, 0.0))).unwrap();
        assert_eq!(g.c, 0.0);
        assert!((g.s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(g.norm, 1.0);
        let mut r0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let mut r1 = [c(0.0, 0.0), c(1.0, 0.0)];
        apply_givens_left(&g, &mut r0, &mut r1);
        assert!(close(r0[0], c(0.0, 0.0), 0.0) && close(r0[1], c(1.0, 0.0), 0.0));
        assert!(close(r1[0].conj() * r1[0], c(1.0, 0.0), 0.0) && r1[1] == c(0.0, 0.0));
    }

    #[test]
    fn three_four_five() {
        let g = make_givens((c::<f64>(3.0, 0.0), c(4.0, 0.0))).unwrap();
        assert_eq!(g.norm, 5.0);
        assert!((g.c - 0.6).abs() < 1e-16);
        assert!(close(g.s, c(0.8, 0.0), 1e-16));
        // the rotation applied to (5, 0): first row (c, s), second row (-s, c)
        let (a, b) = g.rotate(c(5.0, 0.0), c(0.0, 0.0));
        assert!(close(a, c(3.0, 0.0), 1e-15) && close(b, c(-4.0, 0.0), 1e-15));
    }

    #[test]
    fn zero_vector_is_degenerate() {
        assert!(make_givens((c::<f64>(0.0, 0.0), c(0.0, 0.0))).is_err());
        assert!(make_givens((c::<f64>(f64::NAN, 0.0), c(0.0, 0.0))).is_err());
    }

    #[test]
    fn right_adjoint_undoes_left() {
        let g = make_givens((c::<f64>(0.3, -1.2), c(2.0, 0.7))).unwrap();
        let (x, y) = (c(0.5, 0.25), c(-1.0, 3.0));
        // (G^T applied as row) composed with G*: check G* G = I through column action
        let (a, b) = g.rotate(x, y);
        // rows of G* are the conjugate columns of G, so (a,b) -> G*(a,b) = (x,y)
        let gc = [
            [g.phase.conj() * g.c, g.phase.conj() * g.s],
            [-g.phase * g.s.conj(), g.phase * g.c],
        ];
        let xa = gc[0][0].conj() * a + gc[1][0].conj() * b;
        let ya = gc[0][1].conj() * a + gc[1][1].conj() * b;
        assert!(close(xa, x, 1e-14) && close(ya, y, 1e-14));
        // row action (u, v) G* equals (G (u,v)^*)^* componentwise
        let (u, v) = g.rotate_adjoint_right(x, y);
        let (p, q) = g.rotate(x.conj(), y.conj());
        assert!(close(u, p.conj(), 1e-14) && close(v, q.conj(), 1e-14));
    }

    fn cx() -> impl Strategy<Value = C> {
        (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(a, b)| C::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn zeroes_second_entry(a in cx(), b in cx()) {
            prop_assume!(a.norm() + b.norm() > 0.0);
            let g = make_givens((a, b)).unwrap();
            let u = f64::unit_roundoff();
            let nx = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (top, bot) = g.rotate(a, b);
            prop_assert!(bot.norm() <= 8.0 * u * nx);
            prop_assert!((top - C::new(nx, 0.0)).norm() <= 8.0 * u * nx);
            prop_assert!((g.c * g.c + g.s.norm_sqr() - 1.0).abs() <= 4.0 * u);
            prop_assert!(g.c >= 0.0);
        }
    }
}
