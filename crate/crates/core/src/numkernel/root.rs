use super::Real;
use crate::error::{Error, Result};

/// Constant in the admissible tolerance floor `k · C_ROOT · u` and in the Newton step cap.
pub const C_ROOT: f64 = 4.0;

fn powu<T: Real>(x: T, k: u32) -> T {
    let mut base = x;
    let mut e = k;
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `a^{1/k}` to relative accuracy `eps`: geometric bisection on `[min(1,a), max(1,a)]`
/// down to a ratio of `1 + 1/k`, then Newton from the upper end, where it decreases monotonically.
pub fn kth_root<T: Real>(a: T, k: u32, eps: f64) -> Result<T> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "kth_root needs a positive finite argument, got {a:?}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("kth_root of order zero".into()));
    }
    let floor = k as f64 * C_ROOT * T::unit_roundoff();
    if eps < floor || eps > 0.5 {
        return Err(Error::Tolerance { eps, floor });
    }
    if k == 1 || a == T::one() {
        return Ok(a);
    }
    let one = T::one();
    let (mut lo, mut hi) = if a < one { (a, one) } else { (one, a) };
    let ratio = T::from_f64(1.0 + 1.0 / k as f64);
    while hi > lo * ratio {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if powu(mid, k) > a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let kk = T::from_f64(k as f64);
    let km1 = T::from_f64((k - 1) as f64);
    let cap = (C_ROOT * k as f64 * (k as f64 * (1.0 / eps).ln()).ln().max(1.0)).ceil() as usize;
    let mut x = hi;
    let stop = T::from_f64(eps / 4.0);
    for _ in 0..cap.max(8) {
        let next = (km1 * x + a / powu(x, k - 1)) / kk;
        let step = (x - next).abs();
        x = next;
        if step <= stop * x {
            break;
        }
    }
    Ok(x)
}
