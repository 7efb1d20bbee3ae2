use std::f64::consts::TAU;

use num_complex::Complex;
use rand::Rng;

use super::Real;

/// Uniform point of `D(center, radius)` via radius `R·√U₁` and angle `2πU₂`.
pub fn sample_disk<T: Real, R: Rng + ?Sized>(
    center: Complex<T>,
    radius: T,
    rng: &mut R,
) -> Complex<T> {
    let u1 = T::sample_unit(rng);
    let u2 = rng.random::<f64>();
    if radius == T::zero() {
        return center;
    }
    let rho = radius * u1.sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    center + Complex::new(rho * T::from_f64(c), rho * T::from_f64(s))
}

pub fn sample_unit_disk<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    sample_disk(Complex::new(T::zero(), T::zero()), T::one(), rng)
}
