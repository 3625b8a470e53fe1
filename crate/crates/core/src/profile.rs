//! Radial profile of the degree-one vortex core.
//!
//! `f` solves `f'' + f'/r - f/r^2 + (1 - f^2) f = 0` with `f(0) = 0` and
//! `f(inf) = 1`. In the variable `s = log r` this reads
//! `f_ss - f + r^2 (1 - f^2) f = 0`, which is discretized on a uniform
//! `s` mesh and solved by Newton iteration.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::util::gauss_legendre;

const R_MIN: f64 = 1e-4;
const R_MAX: f64 = 40.0;
const MESH: usize = 8001;

/// Which profile is used for the core of initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    #[default]
    Numerical,
    Tanh,
}

#[derive(Debug, Clone)]
pub struct CoreProfile {
    kind: ProfileKind,
    s0: f64,
    ds: f64,
    f: Vec<f64>,
    fs: Vec<f64>,
}

fn far_field(r: f64) -> (f64, f64) {
    let r2 = r * r;
    (
        1.0 - 0.5 / r2 - 1.125 / (r2 * r2),
        1.0 / (r2 * r) + 4.5 / (r2 * r2 * r),
    )
}

impl CoreProfile {
    pub fn new(kind: ProfileKind) -> Result<Self> {
        match kind {
            ProfileKind::Numerical => Self::solve(MESH, 1e-8),
            ProfileKind::Tanh => Ok(CoreProfile {
                kind,
                s0: 0.0,
                ds: 0.0,
                f: Vec::new(),
                fs: Vec::new(),
            }),
        }
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// Newton iteration on `mesh` points until the discrete residual of the
    /// log-variable equation is below `tolerance` in max norm.
    pub(crate) fn solve(mesh: usize, tolerance: f64) -> Result<Self> {
        let s0 = R_MIN.ln();
        let ds = (R_MAX.ln() - s0) / (mesh - 1) as f64;
        let r: Vec<f64> = (0..mesh).map(|k| (s0 + k as f64 * ds).exp()).collect();
        let mut f: Vec<f64> = r.iter().map(|&r| (r / 2f64.sqrt()).tanh()).collect();
        f[mesh - 1] = far_field(R_MAX).0;
        let inv = 1.0 / (ds * ds);
        let m = mesh - 1; // unknowns f[0..m]
        let (mut lo, mut di, mut up, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for iter in 0..60 {
            for k in 0..m {
                let r2 = r[k] * r[k];
                let reaction = -f[k] + r2 * (1.0 - f[k] * f[k]) * f[k];
                let dreaction = -1.0 + r2 * (1.0 - 3.0 * f[k] * f[k]);
                if k == 0 {
                    // ghost value from the Robin condition f_s = f
                    let lap = (2.0 * f[1] - 2.0 * f[0] - 2.0 * ds * f[0]) * inv;
                    rhs[k] = -(lap + reaction);
                    di[k] = (-2.0 - 2.0 * ds) * inv + dreaction;
                    up[k] = 2.0 * inv;
                } else {
                    let lap = (f[k + 1] - 2.0 * f[k] + f[k - 1]) * inv;
                    rhs[k] = -(lap + reaction);
                    lo[k] = inv;
                    di[k] = -2.0 * inv + dreaction;
                    up[k] = if k + 1 < m { inv } else { 0.0 };
                }
            }
            let residual = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if residual < tolerance {
                log::debug!("core profile converged after {iter} Newton steps");
                let mut fs = vec![0.0; mesh];
                fs[0] = f[0];
                for k in 1..mesh - 1 {
                    fs[k] = (f[k + 1] - f[k - 1]) / (2.0 * ds);
                }
                fs[mesh - 1] = far_field(R_MAX).1 * R_MAX;
                return Ok(CoreProfile {
                    kind: ProfileKind::Numerical,
                    s0,
                    ds,
                    f,
                    fs,
                });
            }
            let delta = solve_tridiagonal(&lo, &di, &up, &rhs);
            for k in 0..m {
                f[k] += delta[k];
            }
        }
        Err(Error::NonConvergence(format!(
            "core profile residual did not reach {tolerance:e}"
        )))
    }

    /// Slope at the origin, `f'(0)`.
    pub fn slope_at_origin(&self) -> f64 {
        match self.kind {
            ProfileKind::Tanh => 1.0 / 2f64.sqrt(),
            ProfileKind::Numerical => self.f[0] / R_MIN,
        }
    }

    /// `(f(r), f'(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        match self.kind {
            ProfileKind::Tanh => {
                let t = (r / 2f64.sqrt()).tanh();
                (t, (1.0 - t * t) / 2f64.sqrt())
            }
            ProfileKind::Numerical => {
                if r >= R_MAX {
                    return far_field(r);
                }
                if r <= R_MIN {
                    // f = a r - a r^3 / 8 + O(r^5)
                    let a = self.slope_at_origin();
                    return (a * r * (1.0 - r * r / 8.0), a * (1.0 - 3.0 * r * r / 8.0));
                }
                let s = r.ln();
                let x = ((s - self.s0) / self.ds).min((self.f.len() - 1) as f64 - 1e-12);
                let k = x.floor() as usize;
                let t = x - k as f64;
                let (h00, h10, h01, h11) = (
                    (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
                    t * (1.0 - t) * (1.0 - t),
                    t * t * (3.0 - 2.0 * t),
                    t * t * (t - 1.0),
                );
                let (f0, f1) = (self.f[k], self.f[k + 1]);
                let (d0, d1) = (self.fs[k] * self.ds, self.fs[k + 1] * self.ds);
                let f = h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1;
                let dt = 6.0 * t * (t - 1.0) * (f0 - f1) + (1.0 - 4.0 * t + 3.0 * t * t) * d0
                    + (3.0 * t * t - 2.0 * t) * d1;
                (f, dt / self.ds / r)
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// Energy of the unit-core vortex in the disc of radius `rho`,
    /// `pi int_0^rho (f'^2 + f^2/r^2 + (1 - f^2)^2 / 2) r dr`.
    pub fn disc_energy(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let (nodes, weights) = gauss_legendre(8);
        let s_lo = (1e-8f64).ln();
        let s_hi = rho.ln();
        let panels = (((s_hi - s_lo) / 0.02).ceil() as usize).max(1);
        let width = (s_hi - s_lo) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = s_lo + p as f64 * width;
            for (x, w) in nodes.iter().zip(&weights) {
                let s = a + 0.5 * width * (x + 1.0);
                let r = s.exp();
                let (f, fr) = self.eval(r);
                let fs = fr * r;
                let g = 1.0 - f * f;
                acc += 0.5 * width * w * (fs * fs + f * f + 0.5 * r * r * g * g);
            }
        }
        PI * acc
    }

    /// `lim_{R -> inf} disc_energy(R) - pi log R`; the tail converges like `R^-2`.
    pub fn core_constant(&self) -> f64 {
        let r = 1e3;
        self.disc_energy(r) - PI * r.ln()
    }

    /// `I(epsilon, rho)`, the core energy at scale `epsilon`; it only depends on `rho / epsilon`.
    pub fn core_energy(&self, epsilon: f64, rho: f64) -> f64 {
        self.disc_energy(rho / epsilon)
    }
}

/// Solves for the minimizing core profile with discrete residual below `tolerance`.
pub fn solve_core_profile(tolerance: f64) -> Result<CoreProfile> {
    if !(tolerance > 0.0 && tolerance <= 1e-6) {
        return Err(invalid(format!("tolerance {tolerance} outside (0, 1e-6]")));
    }
    CoreProfile::solve(MESH, tolerance)
}

/// `I(epsilon, rho)`: energy of `f(r/epsilon) e^(i theta)` in the disc of radius `rho`.
pub fn i_eps_rho(profile: &CoreProfile, epsilon: f64, rho: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < rho) {
        return Err(invalid(format!("need 0 < epsilon < rho, got {epsilon}, {rho}")));
    }
    Ok(profile.core_energy(epsilon, rho))
}

/// Thomas algorithm; `lo[0]` and `up[last]` are ignored.
pub(crate) fn solve_tridiagonal(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = di.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = up[0] / di[0];
    d[0] = rhs[0] / di[0];
    for k in 1..m {
        let denom = di[k] - lo[k] * c[k - 1];
        c[k] = up[k] / denom;
        d[k] = (rhs[k] - lo[k] * d[k - 1]) / denom;
    }
    for k in (0..m - 1).rev() {
        d[k] -= c[k] * d[k + 1];
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_and_monotonicity() {
        let p = CoreProfile::new(ProfileKind::Numerical).unwrap();
        assert!((p.slope_at_origin() - 0.5832).abs() < 5e-4, "{}", p.slope_at_origin());
        let mut prev = 0.0;
        for k in 1..2000 {
            let r = k as f64 * 0.025;
            let (f, df) = p.eval(r);
            assert!(f > prev && f < 1.0 && df > 0.0);
            prev = f;
        }
    }

    #[test]
    fn residual_is_small_in_the_core() {
        let p = CoreProfile::new(ProfileKind::Numerical).unwrap();
        let h = 1e-3;
        for r in [0.3, 1.0, 2.5, 6.0] {
            let (f, df) = p.eval(r);
            let ddf = (p.eval(r + h).1 - p.eval(r - h).1) / (2.0 * h);
            let res = ddf + df / r - f / (r * r) + (1.0 - f * f) * f;
            assert!(res.abs() < 1e-3, "r = {r}: {res}");
        }
    }

    #[test]
    fn continuity_at_the_mesh_ends() {
        let p = CoreProfile::new(ProfileKind::Numerical).unwrap();
        for r in [R_MIN, R_MAX] {
            let a = p.value(r * (1.0 - 1e-9));
            let b = p.value(r * (1.0 + 1e-9));
            assert!((a - b).abs() < 1e-6 * r.max(1e-2));
        }
    }

    #[test]
    fn energy_grows_like_pi_log() {
        let p = CoreProfile::new(ProfileKind::Numerical).unwrap();
        let gamma_at = |rho: f64| p.disc_energy(rho) - PI * rho.ln();
        let (a, b) = (gamma_at(50.0), gamma_at(200.0));
        assert!((a - b).abs() < 1e-3, "{a} {b}");
        assert!((p.core_energy(0.1, 2.0) - p.disc_energy(20.0)).abs() < 1e-12);
    }

    #[test]
    fn slope_agrees_with_a_finer_relaxation() {
        let p = solve_core_profile(1e-7).unwrap();
        let fine = CoreProfile::solve(10 * MESH, 1e-6).unwrap();
        assert!((p.slope_at_origin() - fine.slope_at_origin()).abs() < 1e-4);
        for r in [0.5, 1.0, 3.0] {
            assert!((p.value(r) - fine.value(r)).abs() < 1e-5);
        }
    }

    #[test]
    fn halving_epsilon_adds_pi_log_two() {
        let p = CoreProfile::new(ProfileKind::Numerical).unwrap();
        let d = i_eps_rho(&p, 0.005, 0.1).unwrap() - i_eps_rho(&p, 0.01, 0.1).unwrap();
        assert!((d / (PI * 2f64.ln()) - 1.0).abs() < 0.02);
        assert!(i_eps_rho(&p, 0.1, 0.1).is_err());
        assert!(i_eps_rho(&p, 0.1 - 1e-12, 0.1).unwrap().is_finite());
        assert!(solve_core_profile(1e-3).is_err());
    }

    #[test]
    fn tanh_wastes_energy() {
        let p = CoreProfile::new(ProfileKind::Numerical).unwrap();
        let t = CoreProfile::new(ProfileKind::Tanh).unwrap();
        assert!(t.disc_energy(30.0) > p.disc_energy(30.0) + 0.05);
    }

    #[test]
    fn tridiagonal_solve() {
        let lo = [0.0, 1.0, 1.0];
        let di = [4.0, 4.0, 4.0];
        let up = [1.0, 1.0, 0.0];
        let x = solve_tridiagonal(&lo, &di, &up, &[5.0, 6.0, 5.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}
