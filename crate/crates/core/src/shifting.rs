//! The potential-reducing shift strategy: pick an α-promising Ritz value by halving, and fall
//! back to a randomly translated net of exceptional shifts when it stalls.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::driver::GlobalData;
use crate::error::{Error, Result};
use crate::iqr::{comp_tau_scaled, iqr_multi, potential, potential_pow};
use crate::matrix::{HessenbergMatrix, ShiftList};
use crate::numkernel::{c, cabs, sample_disk, Real, Scaled};

/// Ritz value `r` whose `k`-fold shift shrinks `τ` the most, by `log₂ k` rounds of halving.
pub fn find<T: Real>(h: &HessenbergMatrix<T>, ritz: &ShiftList<T>) -> Result<Complex<T>> {
    let k = ritz.degree();
    if !k.is_power_of_two() {
        return Err(Error::Domain(format!(
            "Find needs a power-of-two number of Ritz values, got {k}"
        )));
    }
    let mut cur = ritz.roots().to_vec();
    let mut reps = 1;
    while cur.len() > 1 {
        let half = cur.len() / 2;
        let (r0, r1) = cur.split_at(half);
        let t0 = comp_tau_scaled(h, &ShiftList::new(r0.to_vec())?.power(reps))?;
        let t1 = comp_tau_scaled(h, &ShiftList::new(r1.to_vec())?.power(reps))?;
        cur = if t1 < t0 { r1.to_vec() } else { r0.to_vec() };
        reps *= 2;
    }
    Ok(cur[0])
}

/// Upper bound `S(ε)` on the size of a maximal `0.99ε`-net of `D(0, 1 + ε)`.
pub fn net_size_bound(epsilon: f64) -> f64 {
    let t = 1.99 + 1.0 / (0.99 * epsilon);
    2.0 * PI / (3.0 * 3f64.sqrt()) * t * t + 4.0 * 2f64.sqrt() / 3f64.sqrt() * t + 1.0
}

/// Triangular lattice of spacing `√3·0.99ε` clipped to `D(0, 1 + 1.99ε)`, row by row.
pub fn build_net(epsilon: f64) -> Result<Vec<Complex<f64>>> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::Domain(format!(
            "net resolution must lie in (0, 2], got {epsilon}"
        )));
    }
    let a = 3f64.sqrt() * 0.99 * epsilon;
    let dy = a * 3f64.sqrt() / 2.0;
    let radius = 1.0 + 1.99 * epsilon;
    let rows = (radius / dy).floor() as i64;
    let mut out = Vec::new();
    for j in -rows..=rows {
        let y = j as f64 * dy;
        let offset = j as f64 * a / 2.0;
        let lo = ((-radius - offset) / a).floor() as i64;
        let hi = ((radius - offset) / a).ceil() as i64;
        for i in lo..=hi {
            let x = i as f64 * a + offset;
            if x.hypot(y) <= radius {
                out.push(Complex::new(x, y));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ExcParams {
    pub r_hat: f64,
    pub epsilon: f64,
    pub xi: f64,
    pub net_points: Vec<Complex<f64>>,
    /// Random translation `w`.
    pub translation: Complex<f64>,
}

/// Net resolution for the exceptional shifts.
pub fn exc_epsilon(xi: f64, g: &GlobalData) -> f64 {
    let k = g.k as f64;
    let base = xi * (1.0 - g.gamma)
        / ((13.0 * g.b.powi(4)).powf(1.0 / k) * g.alpha.powi(2) * g.theta.powi(2));
    base.powf(k / (k - 1.0))
}

/// Candidate exceptional shifts around the promising value `r`, in net order.
pub fn exc<T: Real, R: Rng + ?Sized>(
    h: &HessenbergMatrix<T>,
    r: Complex<T>,
    omega: f64,
    xi: f64,
    g: &GlobalData,
    rng: &mut R,
) -> Result<(ExcParams, ShiftList<T>)> {
    let k = g.k;
    if h.is_decoupled(k, omega) {
        return Err(Error::Precondition(format!(
            "input has a bottom-{k} subdiagonal <= omega = {omega:e}"
        )));
    }
    let kf = k as f64;
    let psi = potential(h, k)?.to_f64();
    let r_hat = 2f64.powf(1.0 / kf) * g.alpha * g.b.powf(1.0 / kf) * g.theta * psi;
    let epsilon = exc_epsilon(xi, g);
    let bound = net_size_bound(epsilon);
    if !(bound <= g.net_cap as f64) {
        return Err(Error::NetTooLarge {
            points: bound,
            cap: g.net_cap,
        });
    }
    let net_points = build_net(epsilon)?;
    let w: Complex<T> = sample_disk(
        Complex::new(T::zero(), T::zero()),
        T::from_f64(epsilon * r_hat),
        rng,
    );
    let rh = T::from_f64(r_hat);
    let shifts = net_points
        .iter()
        .map(|p| {
            let d = w + c::<T>(p.re, p.im) * rh;
            let m = cabs(d);
            if m > rh {
                r + d * (rh / m)
            } else {
                r + d
            }
        })
        .collect();
    let translation = Complex::new(w.re.to_f64(), w.im.to_f64());
    Ok((
        ExcParams {
            r_hat,
            epsilon,
            xi,
            net_points,
            translation,
        },
        ShiftList::new(shifts)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    RitzShift,
    Exceptional,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::RitzShift => "ritz_shift",
            Branch::Exceptional => "exceptional",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShStepOutcome<T: Real> {
    pub next_h: HessenbergMatrix<T>,
    pub branch: Branch,
    pub shift_used: ShiftList<T>,
    /// Output of `find`.
    pub promising: Complex<T>,
    pub psi_before: f64,
    pub psi_after: f64,
    /// Exceptional candidates evaluated up to and including the accepted one.
    pub candidates_tried: usize,
}

fn psi_of(p: Scaled, k: usize) -> f64 {
    if p.is_zero() {
        0.0
    } else {
        (p.log2() / k as f64).exp2()
    }
}

/// One potential-reducing step on an ω-unreduced `h` with θ-optimal Ritz values.
pub fn sh_step<T: Real, R: Rng + ?Sized>(
    h: &HessenbergMatrix<T>,
    ritz: &ShiftList<T>,
    omega: f64,
    g: &GlobalData,
    rng: &mut R,
) -> Result<ShStepOutcome<T>> {
    let k = g.k;
    if h.n() <= k {
        return Err(Error::Precondition(format!(
            "dimension {} must exceed the shift degree {k}",
            h.n()
        )));
    }
    if h.is_decoupled(k, omega) {
        return Err(Error::Precondition(format!(
            "input has a bottom-{k} subdiagonal <= omega = {omega:e}"
        )));
    }
    let r = find(h, ritz)?;
    let before = potential_pow(h, k)?;
    let psi_before = psi_of(before, k);
    let p = ShiftList::repeated(r, k)?;
    let reduced = before.mul(Scaled::from_real(1.0 - g.gamma).powi(k as u32));
    if comp_tau_scaled(h, &p)? < reduced {
        let next_h = iqr_multi(h, &p)?.next_h;
        let psi_after = psi_of(potential_pow(&next_h, k)?, k);
        return Ok(ShStepOutcome {
            next_h,
            branch: Branch::RitzShift,
            shift_used: p,
            promising: r,
            psi_before,
            psi_after,
            candidates_tried: 0,
        });
    }
    let xi = 0.999 * (1.0 - g.gamma);
    let (_, cands) = exc(h, r, omega, xi, g, rng)?;
    let target = before.mul(Scaled::from_real(1.002 * (1.0 - g.gamma)).powi(k as u32));
    let hit = cands
        .roots()
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let res =
                ShiftList::repeated(s, k).and_then(|q| Ok((q.clone(), iqr_multi(h, &q)?.next_h)));
            (i, res)
        })
        .find_first(|(_, res)| match res {
            Ok((_, nh)) => {
                nh.is_decoupled(k, omega)
                    || potential_pow(nh, k).map(|pp| pp < target).unwrap_or(false)
            }
            Err(_) => true,
        });
    match hit {
        Some((i, res)) => {
            let (shift_used, next_h) = res?;
            let psi_after = psi_of(potential_pow(&next_h, k)?, k);
            Ok(ShStepOutcome {
                next_h,
                branch: Branch::Exceptional,
                shift_used,
                promising: r,
                psi_before,
                psi_after,
                candidates_tried: i + 1,
            })
        }
        None => Err(Error::NoCandidate {
            tried: cands.degree(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use crate::ritz::{AberthSolver, SmallEigSolver};
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_h(n: usize, seed: u64) -> HessenbergMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = DenseMatrix::from_fn(n, |i, j| {
            if i > j + 1 {
                Complex::zero()
            } else {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            }
        });
        HessenbergMatrix::from_dense(d).unwrap()
    }

    fn unit_globals(h: &HessenbergMatrix<f64>) -> GlobalData {
        GlobalData::new(1.0, 1.0, 2.0 * h.frobenius(), h.n()).unwrap()
    }

    #[test]
    fn net_size_at_one() {
        assert!((net_size_bound(1.0) - 21.68).abs() < 0.01);
        let net = build_net(1.0).unwrap();
        assert!(net.len() <= 21);
    }

    #[test]
    fn net_packs_and_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for eps in [0.05, 0.3, 1.0] {
            let net = build_net(eps).unwrap();
            assert!(net.len() as f64 <= net_size_bound(eps));
            for (i, a) in net.iter().enumerate() {
                for b in &net[i + 1..] {
                    assert!((a - b).norm() >= 0.99 * eps);
                }
            }
            for _ in 0..10_000 {
                let z: Complex<f64> =
                    crate::numkernel::sample_disk(Complex::zero(), 1.0 + eps, &mut rng);
                let d = net
                    .iter()
                    .map(|p| (p - z).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(d <= 0.99 * eps * (1.0 + 1e-12));
            }
        }
        assert!(build_net(0.0).is_err());
        assert!(build_net(-1.0).is_err());
    }

    #[test]
    fn find_picks_the_smaller_tau() {
        let h = random_h(6, 1);
        let ritz = ShiftList::new(vec![c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
        let r = find(&h, &ritz).unwrap();
        let t: Vec<f64> = ritz
            .roots()
            .iter()
            .map(|&s| {
                comp_tau_scaled(&h, &ShiftList::single(s).unwrap())
                    .unwrap()
                    .to_f64()
            })
            .collect();
        let want = if t[1] < t[0] {
            ritz.roots()[1]
        } else {
            ritz.roots()[0]
        };
        assert_eq!(r, want);
    }

    #[test]
    fn find_breaks_ties_towards_the_first_half() {
        let h = random_h(6, 2);
        let s = c(0.1, 0.1);
        let ritz = ShiftList::new(vec![s, s, s, s]).unwrap();
        assert_eq!(find(&h, &ritz).unwrap(), s);
        assert!(find(&h, &ShiftList::new(vec![s, s, s]).unwrap()).is_err());
    }

    #[test]
    fn exc_candidates_lie_in_the_disk() {
        let h = random_h(8, 3);
        let g = unit_globals(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = c(0.1, -0.2);
        let (p, s) = exc(&h, r, 1e-8, 0.999 * 0.8, &g, &mut rng).unwrap();
        let psi = potential(&h, 4).unwrap();
        assert!(p.r_hat <= 1.001 * g.theta * g.alpha * psi * 1.0001 * 2f64.powf(0.25));
        assert_eq!(s.degree(), p.net_points.len());
        assert!(s.degree() as f64 <= net_size_bound(p.epsilon));
        for z in s.roots() {
            assert!((z - r).norm() <= p.r_hat * (1.0 + 1e-12));
        }
    }

    #[test]
    fn exc_refuses_oversized_nets() {
        let h = random_h(8, 3);
        let g = unit_globals(&h).with_net_cap(10);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = exc(&h, c(0.0, 0.0), 1e-8, 0.8, &g, &mut rng).unwrap_err();
        assert!(matches!(err, Error::NetTooLarge { .. }));
    }

    #[test]
    fn near_eigenvalue_takes_the_ritz_branch() {
        let h = random_h(10, 4);
        let eig = AberthSolver::default()
            .solve(h.as_dense(), 1e-12, 0.1)
            .unwrap();
        let ritz = ShiftList::new(vec![eig[0], c(5.0, 5.0), c(-5.0, 5.0), c(5.0, -5.0)]).unwrap();
        let g = unit_globals(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = sh_step(&h, &ritz, 1e-14, &g, &mut rng).unwrap();
        assert_eq!(out.branch, Branch::RitzShift);
        assert_eq!(out.promising, eig[0]);
        assert!(out.psi_after <= 0.51 * out.psi_before);
    }

    #[test]
    fn step_reduces_potential_or_decouples() {
        let solver = AberthSolver::default();
        for seed in 0..10 {
            let h = random_h(12, 100 + seed);
            let g = unit_globals(&h);
            let ritz = ShiftList::new(solver.solve(&h.corner(4), 1e-14, 0.1).unwrap()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = sh_step(&h, &ritz, 1e-10, &g, &mut rng).unwrap();
            assert!(out.next_h.is_decoupled(4, 1e-10) || out.psi_after <= 0.8016 * out.psi_before);
        }
    }

    #[test]
    fn decoupled_input_is_rejected() {
        let mut h = random_h(8, 5);
        h.set(6, 5, c(0.0, 0.0));
        let g = unit_globals(&h);
        let ritz = ShiftList::repeated(c(0.0, 0.0), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sh_step(&h, &ritz, 1e-8, &g, &mut rng),
            Err(Error::Precondition(_))
        ));
    }
}
