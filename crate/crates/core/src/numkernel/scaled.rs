use std::cmp::Ordering;

use super::{kth_root, DoubleDouble, Real};
use crate::error::Result;

/// Nonnegative real `mant · 2^exp` with a double-double mantissa in `[1, 2)`.
///
/// Products of many moduli (potentials, `R_nn` chains) leave the `f64` exponent range
/// long before they lose meaning; this keeps them exact to double-double precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    mant: DoubleDouble,
    exp: i64,
}

fn split(x: f64) -> (f64, i64) {
    // frexp-style decomposition into [1, 2) × 2^e
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        let (m, e) = split(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
    (m, raw - 1023)
}

/// `x · 2^e`, split so no intermediate power of two leaves the `f64` range.
fn ldexp(mut x: DoubleDouble, mut e: i64) -> DoubleDouble {
    while e != 0 {
        let step = e.clamp(-600, 600);
        x = x.mul_f64((step as f64).exp2());
        e -= step;
        if x.hi == 0.0 || !x.hi.is_finite() {
            break;
        }
    }
    x
}

impl Scaled {
    pub const ZERO: Self = Self {
        mant: DoubleDouble::ZERO,
        exp: 0,
    };
    pub const ONE: Self = Self {
        mant: DoubleDouble::ONE,
        exp: 0,
    };

    pub fn from_dd(x: DoubleDouble) -> Self {
        let x = x.abs();
        if x.hi == 0.0 {
            return Self::ZERO;
        }
        let (_, e) = split(x.hi);
        let mut s = Self {
            mant: ldexp(x, -e),
            exp: e,
        };
        s.normalize();
        s
    }

    pub fn from_real<T: Real>(x: T) -> Self {
        Self::from_dd(x.to_dd())
    }

    fn normalize(&mut self) {
        if self.mant.hi == 0.0 {
            *self = Self::ZERO;
            return;
        }
        let (_, e) = split(self.mant.hi);
        if e != 0 {
            self.mant = ldexp(self.mant, -e);
            self.exp += e;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.hi == 0.0
    }

    pub fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::ZERO;
        }
        let mut s = Self {
            mant: self.mant * o.mant,
            exp: self.exp + o.exp,
        };
        s.normalize();
        s
    }

    pub fn mul_real<T: Real>(self, x: T) -> Self {
        self.mul(Self::from_real(x))
    }

    pub fn powi(self, k: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    /// `log2` to about `f64` accuracy; `-inf` for zero.
    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.exp as f64 + self.mant.to_f64().log2()
    }

    pub fn to_dd(&self) -> DoubleDouble {
        if self.is_zero() {
            return DoubleDouble::ZERO;
        }
        ldexp(self.mant, self.exp.clamp(-2200, 2200))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_dd().to_f64()
    }

    pub fn to_real<T: Real>(&self) -> T {
        T::from_dd(self.to_dd())
    }

    /// `self^{1/k}` in precision `T` with relative error at most `eps`.
    pub fn kth_root<T: Real>(&self, k: u32, eps: f64) -> Result<T> {
        if self.is_zero() {
            return Ok(T::zero());
        }
        let kk = k as i64;
        let q = self.exp.div_euclid(kk);
        let rem = self.exp.rem_euclid(kk);
        // mant · 2^rem lies in [1, 2^k); its root lies in [1, 2)
        let mut scaled = Scaled {
            mant: self.mant,
            exp: rem,
        }
        .to_dd();
        if rem > 1000 {
            // k beyond ~1000: fold the excess into q
            scaled = self.mant;
            let r = kth_root(T::from_dd(scaled), k, eps)?;
            return Ok(r * T::from_f64((rem as f64 / k as f64 + q as f64).exp2()));
        }
        let r = kth_root(T::from_dd(scaled), k, eps)?;
        Ok(r * T::from_dd(
            Scaled {
                mant: DoubleDouble::ONE,
                exp: q,
            }
            .to_dd(),
        ))
    }
}

impl PartialOrd for Scaled {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ => match self.exp.cmp(&o.exp) {
                Ordering::Equal => self.mant.partial_cmp(&o.mant),
                c => Some(c),
            },
        }
    }
}
