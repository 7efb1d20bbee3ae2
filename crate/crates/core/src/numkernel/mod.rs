//! Scalar layer shared by every algorithmic module: the [`Real`] abstraction over
//! working precisions, complex helpers, Givens rotations, k-th roots, disk sampling
//! and an exponent-tracking product for long chains of moduli.

mod dd;
mod givens;
mod root;
mod sample;
mod scaled;

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, RemAssign, SubAssign};

use num_complex::Complex;
use num_traits::Num;
use rand::Rng;

pub use dd::DoubleDouble;
pub use givens::{apply_givens_left, apply_givens_right, make_givens, GivensRotation};
pub use root::{kth_root, C_ROOT};
pub use sample::{sample_disk, sample_unit_disk};
pub use scaled::Scaled;

use crate::error::{Error, Result};

/// Floating-point scalar with a fixed significand width.
pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Sum
    + 'static
{
    const MANTISSA_BITS: u32;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn from_dd(x: DoubleDouble) -> Self;
    fn to_dd(self) -> DoubleDouble;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;

    /// `sqrt(self² + o²)` without intermediate overflow.
    fn hypot(self, o: Self) -> Self {
        let (a, b) = (self.abs(), o.abs());
        let m = a.max(b);
        if m == Self::zero() {
            return m;
        }
        let (x, y) = (a / m, b / m);
        m * (x * x + y * y).sqrt()
    }

    /// Uniform draw from [0, 1) carrying the full significand.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_f64(rng.random::<f64>())
    }

    fn unit_roundoff() -> f64 {
        PrecisionConfig::new(Self::MANTISSA_BITS)
            .map(|p| p.unit_roundoff())
            .unwrap_or(f64::NAN)
    }

    fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }

    fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = 53;
    const NAME: &'static str = "binary64";
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn from_dd(x: DoubleDouble) -> Self {
        x.to_f64()
    }
    fn to_dd(self) -> DoubleDouble {
        DoubleDouble::from_f64(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn hypot(self, o: Self) -> Self {
        f64::hypot(self, o)
    }
}

impl Real for f32 {
    const MANTISSA_BITS: u32 = 24;
    const NAME: &'static str = "binary32";
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_dd(x: DoubleDouble) -> Self {
        x.to_f64() as f32
    }
    fn to_dd(self) -> DoubleDouble {
        DoubleDouble::from_f64(self as f64)
    }
    fn sqrt(self) -> Self {
        f32::sqrt(self)
    }
    fn abs(self) -> Self {
        f32::abs(self)
    }
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    fn hypot(self, o: Self) -> Self {
        f32::hypot(self, o)
    }
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }
}

impl Real for DoubleDouble {
    const MANTISSA_BITS: u32 = 106;
    const NAME: &'static str = "double-double";
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn from_dd(x: DoubleDouble) -> Self {
        x
    }
    fn to_dd(self) -> DoubleDouble {
        self
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let hi = rng.random::<f64>();
        let lo = rng.random::<f64>() * f64::EPSILON * 0.5;
        DoubleDouble::from_sum(hi, lo)
    }
}

/// Significand width of the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionConfig {
    mantissa_bits: u32,
}

impl PrecisionConfig {
    pub fn new(mantissa_bits: u32) -> Result<Self> {
        // u = 2^(1-p) <= 1/24 needs p >= 6
        if mantissa_bits < 6 {
            return Err(Error::Domain(format!(
                "{mantissa_bits} mantissa bits give unit roundoff above 1/24"
            )));
        }
        Ok(Self { mantissa_bits })
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn unit_roundoff(&self) -> f64 {
        (1.0 - self.mantissa_bits as f64).exp2()
    }

    /// Narrowest native backend with at least the requested significand.
    pub fn backend(&self) -> Result<Backend> {
        match self.mantissa_bits {
            0..=24 => Ok(Backend::Binary32),
            25..=53 => Ok(Backend::Binary64),
            54..=106 => Ok(Backend::DoubleDouble),
            b => Err(Error::Domain(format!(
                "{b} bits exceeds the widest backend (106)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Binary32,
    Binary64,
    DoubleDouble,
}

pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

/// Modulus with scaling so squaring cannot overflow.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

pub fn cabs_dd<T: Real>(z: Complex<T>) -> DoubleDouble {
    let re = z.re.to_dd();
    let im = z.im.to_dd();
    (re * re + im * im).sqrt()
}

pub fn cfinite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn to_dd_c<T: Real>(z: Complex<T>) -> Complex<DoubleDouble> {
    Complex::new(z.re.to_dd(), z.im.to_dd())
}

pub fn from_dd_c<T: Real>(z: Complex<DoubleDouble>) -> Complex<T> {
    Complex::new(T::from_dd(z.re), T::from_dd(z.im))
}

pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn cast_c<T: Real, U: Real>(z: Complex<T>) -> Complex<U> {
    Complex::new(U::from_dd(z.re.to_dd()), U::from_dd(z.im.to_dd()))
}

/// Unit-modulus phase of `z`, or one when `z` is zero.
pub fn phase<T: Real>(z: Complex<T>) -> Complex<T> {
    let m = cabs(z);
    if m == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        Complex::new(z.re / m, z.im / m)
    }
}
