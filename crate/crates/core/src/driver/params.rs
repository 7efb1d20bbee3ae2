//! Global constants derived from the defining data `(B, Γ, Σ)` and the per-run parameters.

use crate::error::{Error, Result};

pub const GAMMA: f64 = 0.2;
/// Guaranteed per-iteration potential contraction `1.002(1 − γ)`.
pub const CONTRACTION: f64 = 1.002 * (1.0 - GAMMA);
pub const DEFAULT_NET_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalData {
    /// Bound `B` on the eigenvector condition number.
    pub b: f64,
    /// Lower bound `Γ` on the minimum eigenvalue gap.
    pub gap_bound: f64,
    /// Upper bound `Σ` on the norm.
    pub sigma: f64,
    pub n0: usize,
    pub k: usize,
    pub alpha: f64,
    pub theta: f64,
    pub gamma: f64,
    /// Refuse exceptional-shift nets with more points than this.
    pub net_cap: usize,
}

fn feasible(b: f64, k: usize) -> bool {
    let km1 = (k - 1) as f64;
    let lhs = ((8.0 * (k as f64).log2() + 3.0) * b.ln() + 2.0 * (2.0 * b.powi(4)).ln()) / km1;
    lhs <= 3f64.ln()
}

/// Smallest power of two `k ≥ 2` satisfying the degree feasibility inequality.
pub fn degree_for(b: f64) -> Result<usize> {
    if !(b >= 1.0) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "condition bound B must be a finite number >= 1, got {b}"
        )));
    }
    let mut k = 2usize;
    while !feasible(b, k) {
        k = k
            .checked_mul(2)
            .ok_or_else(|| Error::Domain(format!("no feasible degree for B = {b}")))?;
    }
    Ok(k)
}

pub fn alpha_for(b: f64, k: usize) -> f64 {
    (1.01 * b).powf(4.0 * (k as f64).log2() / k as f64)
}

pub fn theta_for(b: f64, k: usize) -> f64 {
    let kf = k as f64;
    1.01 / 0.998f64.powf(1.0 / kf) * (2.0 * b.powi(4)).powf(1.0 / (2.0 * kf))
}

impl GlobalData {
    pub fn new(b: f64, gap_bound: f64, sigma: f64, n0: usize) -> Result<Self> {
        let k = degree_for(b)?;
        if !(gap_bound > 0.0 && gap_bound.is_finite()) {
            return Err(Error::Domain(format!(
                "gap bound must be positive, got {gap_bound}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "norm bound must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            b,
            gap_bound,
            sigma,
            n0,
            k,
            alpha: alpha_for(b, k),
            theta: theta_for(b, k),
            gamma: GAMMA,
            net_cap: DEFAULT_NET_CAP,
        })
    }

    /// Same data with a caller-chosen shift degree; `α` and `θ` follow the chosen `k`.
    pub fn with_degree(mut self, k: usize) -> Result<Self> {
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::Domain(format!(
                "shift degree must be a power of two >= 2, got {k}"
            )));
        }
        self.k = k;
        self.alpha = alpha_for(self.b, k);
        self.theta = theta_for(self.b, k);
        Ok(self)
    }

    pub fn with_net_cap(mut self, cap: usize) -> Self {
        self.net_cap = cap;
        self
    }

    /// Whether `k` meets the feasibility inequality for this `B`.
    pub fn degree_is_feasible(&self) -> bool {
        feasible(self.b, self.k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunParams {
    pub delta: f64,
    pub phi: f64,
    pub omega: f64,
    pub phi_working: f64,
    pub n_dec: f64,
    pub seed: u64,
}

impl RunParams {
    /// Iteration cap per while loop.
    pub fn budget(&self) -> usize {
        (self.n_dec.floor() as usize).max(1)
    }
}

pub fn derive_run_params(
    n: usize,
    delta: f64,
    phi: f64,
    g: &GlobalData,
    seed: u64,
) -> Result<RunParams> {
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if !(delta > 0.0 && delta <= g.sigma) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, Σ = {}], got {delta}",
            g.sigma
        )));
    }
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::Domain(format!("phi must lie in (0, 1), got {phi}")));
    }
    let nf = n as f64;
    let omega = (delta.min(g.gap_bound / (8.0 * nf * nf * g.b * g.b))) / (4.0 * nf);
    let contraction = (1.002 * (1.0 - g.gamma)).recip().ln();
    let ratio = (g.sigma / omega).ln();
    Ok(RunParams {
        delta,
        phi,
        omega,
        phi_working: phi / (3.0 * nf * nf) * contraction / ratio,
        n_dec: ratio / contraction,
        seed,
    })
}

fn lg(x: f64) -> f64 {
    x.log2()
}

fn nu_iqr(n: f64) -> f64 {
    32.0 * n.powf(1.5)
}

/// Each bound below is `log₂ u_*` for the corresponding precision requirement, with `‖H‖ → Σ`
/// and `κ_V → B`.
mod bound {
    use super::{lg, nu_iqr};
    use crate::numkernel::C_ROOT;

    pub fn iqr(n: f64, k: f64, norm: f64, kappa: f64, dist: f64) -> f64 {
        -lg(8.0 * kappa * nu_iqr(n)) + k * lg(dist / norm)
    }

    pub fn comp_tau(n: f64, k: f64, c: f64, norm: f64, kappa: f64, dist: f64) -> f64 {
        -lg(6e3 * kappa * nu_iqr(n)) + 2.0 * k * lg(dist / ((2.0 + 2.0 * c) * norm))
    }

    pub fn optimal(n: f64, k: f64, c: f64, norm: f64, theta: f64, psi: f64) -> f64 {
        -lg(2e3 * n * n) + k * lg(psi / (theta * (2.0 + 2.0 * c) * norm))
    }

    pub fn psi(k: f64) -> f64 {
        let t = 1.0 - 0.999f64.powf(1.0 / k);
        lg(t / (k * (C_ROOT + t)))
    }

    pub fn potential_apx(
        n: f64,
        k: f64,
        c: f64,
        norm: f64,
        kappa: f64,
        dist: f64,
        omega: f64,
    ) -> f64 {
        lg(0.001 * omega) + k * lg(dist)
            - lg(32.0 * kappa * norm * n.sqrt() * nu_iqr(n))
            - k * lg(norm * (2.0 + 2.0 * c))
    }
}

#[derive(Clone, Copy, Debug)]
struct PrecisionInputs {
    n: f64,
    k: f64,
    sigma: f64,
    b: f64,
    theta: f64,
    alpha: f64,
    gamma: f64,
    omega: f64,
    phi: f64,
    n_dec: f64,
}

impl PrecisionInputs {
    fn ritz_dist(&self) -> f64 {
        self.omega * self.omega * self.phi.sqrt()
            / (32.0 * 101.0 * self.sigma * (2.0 * self.k).sqrt())
    }

    fn loop_drift(&self) -> f64 {
        lg(self.omega) - lg(4.5 * self.k * self.n_dec * self.n * nu_iqr(self.n) * self.sigma)
    }

    fn ritz_or_decouple(&self) -> f64 {
        let p = self;
        // ψ_k ≥ ω throughout an unreduced loop, so ω is the worst case
        let opt = bound::optimal(p.n, p.k, 1.1, p.sigma, p.theta, p.omega);
        let reg = lg(p.omega / (8.0 * p.n.sqrt() * p.sigma))
            + bound::iqr(p.n, p.k, p.sigma, p.b, self.ritz_dist());
        opt.min(reg)
    }

    fn exc(&self, c: f64, xi: f64) -> f64 {
        let p = self;
        let cp = p.alpha * p.b.powf(1.0 / p.k);
        let eps = (xi * (1.0 - p.gamma)
            / ((13.0 * p.b.powi(4)).powf(1.0 / p.k) * p.alpha.powi(2) * p.theta.powi(2)))
        .powf(p.k / (p.k - 1.0));
        let second = lg(0.1 * eps * 1.998 * p.theta * cp * p.omega
            / (4.0 * (eps + 2.0 * (1.0 + eps) * c * p.sigma)));
        let dist = eps * 1.998 * p.theta * cp * p.omega * p.phi.sqrt() / (3.0 * p.n).sqrt();
        let third = bound::potential_apx(p.n, p.k, c, p.sigma, p.b, dist, p.omega);
        bound::psi(p.k).min(second).min(third)
    }

    fn sh(&self, c: f64, dist: f64) -> f64 {
        let p = self;
        let find = bound::comp_tau(p.n, p.k / 2.0, c, p.sigma, p.b, dist);
        let exc = self.exc(c, 0.999 * (1.0 - p.gamma));
        let pot = bound::potential_apx(p.n, p.k, c, p.sigma, p.b, dist, p.omega);
        find.min(exc).min(pot)
    }

    fn total(&self) -> f64 {
        self.loop_drift()
            .min(self.ritz_or_decouple())
            .min(self.sh(3.0, self.ritz_dist()))
    }
}

/// Bits of mantissa under which every precision hypothesis of the main loop holds.
pub fn required_precision(
    n: usize,
    k: usize,
    sigma: f64,
    b: f64,
    gamma_bound: f64,
    delta: f64,
    phi: f64,
) -> Result<u32> {
    let g = GlobalData::new(b, gamma_bound, sigma, n)?.with_degree(k)?;
    let rp = derive_run_params(n, delta, phi, &g, 0)?;
    Ok(required_precision_for(&g, &rp, n))
}

pub fn required_precision_for(g: &GlobalData, rp: &RunParams, n: usize) -> u32 {
    let inputs = PrecisionInputs {
        n: n as f64,
        k: g.k as f64,
        sigma: g.sigma,
        b: g.b,
        theta: g.theta,
        alpha: g.alpha,
        gamma: g.gamma,
        omega: rp.omega,
        phi: rp.phi_working,
        n_dec: rp.n_dec,
    };
    (-inputs.total()).ceil().max(1.0) as u32
}

/// Bits needed by the loop-drift term alone.
pub fn loop_drift_bits(n: usize, k: usize, sigma: f64, omega: f64, n_dec: f64) -> u32 {
    let nf = n as f64;
    let log_u = lg(omega) - lg(4.5 * k as f64 * n_dec * nf * nu_iqr(nf) * sigma);
    (-log_u).ceil() as u32
}
