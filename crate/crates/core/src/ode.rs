//! Point-vortex dynamics `da_i/dt = 2 sum_{j != i} d_j curl F(a_i - a_j)`,
//! the Hamiltonian flow of the renormalized energy `W`.

use serde::{Deserialize, Serialize};

use crate::config::VortexConfig;
use crate::error::{invalid, Error, Result};
use crate::green::{grad_w, renormalized_energy, GreenTable};
use crate::torus::{min_image_diff, rotate, wrap, TorusPoint, TorusVector};

/// Separation below which the flow is declared singular.
pub const COLLISION_RADIUS: f64 = 1e-3;

/// Positions are kept in the covering plane so that `sum d_i a_i` is meaningful.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub lifted: Vec<[f64; 2]>,
    pub degrees: Vec<i32>,
    pub t: f64,
    /// `W` at the initial time.
    pub w0: f64,
    /// `sum d_i a_i` at the initial time.
    pub p0: [f64; 2],
}

impl OdeState {
    pub fn new(table: &GreenTable, cfg: &VortexConfig) -> Result<Self> {
        let lifted: Vec<[f64; 2]> = cfg.points().iter().map(|p| p.coords()).collect();
        let mut s = OdeState {
            lifted,
            degrees: cfg.degrees().to_vec(),
            t: 0.0,
            w0: 0.0,
            p0: [0.0; 2],
        };
        s.w0 = hamiltonian(table, &s)?;
        s.p0 = impulse(&s);
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.lifted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifted.is_empty()
    }

    pub fn wrapped(&self) -> Result<Vec<TorusPoint>> {
        self.lifted.iter().map(|a| wrap(a[0], a[1])).collect()
    }

    pub fn config(&self) -> Result<VortexConfig> {
        VortexConfig::with_general_degrees(self.wrapped()?, self.degrees.clone())
    }

    /// Smallest pairwise geodesic separation.
    pub fn min_separation(&self) -> f64 {
        let pts: Vec<TorusVector> = self.lifted.iter().map(|a| TorusVector::from_raw(a[0], a[1])).collect();
        let mut m = f64::INFINITY;
        for i in 0..pts.len() {
            for j in 0..i {
                let d = TorusVector::from_raw(pts[i].v1 - pts[j].v1, pts[i].v2 - pts[j].v2);
                m = m.min(crate::torus::min_image_component(d.v1).hypot(crate::torus::min_image_component(d.v2)));
            }
        }
        m
    }
}

/// Velocities from the pairwise Green sum, cross-checked against the
/// Hamiltonian form `-(1 / (pi d_i)) J D_{a_i} W` (which is `-(1/pi) d_i J D_{a_i} W`
/// for unit degrees).
pub fn velocity(table: &GreenTable, state: &OdeState) -> Result<Vec<[f64; 2]>> {
    let pts = state.wrapped()?;
    let d = &state.degrees;
    let m = pts.len();
    let mut v = vec![[0.0; 2]; m];
    for i in 0..m {
        for j in 0..i {
            let s = min_image_diff(pts[i], pts[j]);
            if s.norm() < COLLISION_RADIUS {
                return Err(Error::SingularConfiguration(format!(
                    "vortices {j} and {i} closer than {COLLISION_RADIUS} at t = {}",
                    state.t
                )));
            }
            // curl F is odd, so the pair contributes with opposite signs
            let g = table.eval_curl_f(s)?;
            v[i][0] += 2.0 * d[j] as f64 * g[0];
            v[i][1] += 2.0 * d[j] as f64 * g[1];
            v[j][0] -= 2.0 * d[i] as f64 * g[0];
            v[j][1] -= 2.0 * d[i] as f64 * g[1];
        }
    }
    let cfg = VortexConfig::with_general_degrees(pts, d.clone())?;
    for i in 0..m {
        let gw = grad_w(table, &cfg, i)?;
        let jg = rotate(gw);
        let c = -1.0 / (std::f64::consts::PI * d[i] as f64);
        let h = [c * jg[0], c * jg[1]];
        let err = (h[0] - v[i][0]).hypot(h[1] - v[i][1]);
        if err > 1e-10 * (1.0 + v[i][0].hypot(v[i][1])) {
            return Err(Error::NonConvergence(format!(
                "Green-sum and Hamiltonian velocities disagree by {err:e} for vortex {i}"
            )));
        }
    }
    Ok(v)
}

/// `W(a, d)`.
pub fn hamiltonian(table: &GreenTable, state: &OdeState) -> Result<f64> {
    renormalized_energy(table, &state.config()?)
}

/// `sum d_i a_i` in lifted coordinates.
pub fn impulse(state: &OdeState) -> [f64; 2] {
    let mut p = [0.0; 2];
    for (a, &d) in state.lifted.iter().zip(&state.degrees) {
        p[0] += d as f64 * a[0];
        p[1] += d as f64 * a[1];
    }
    p
}

fn shifted(state: &OdeState, k: &[[f64; 2]], scale: f64) -> OdeState {
    let mut s = state.clone();
    for (a, v) in s.lifted.iter_mut().zip(k) {
        a[0] += scale * v[0];
        a[1] += scale * v[1];
    }
    s
}

/// One classical fourth-order Runge-Kutta step (negative `dt` runs backwards).
pub fn step(table: &GreenTable, state: &OdeState, dt: f64) -> Result<OdeState> {
    let k1 = velocity(table, state)?;
    let k2 = velocity(table, &shifted(state, &k1, 0.5 * dt))?;
    let k3 = velocity(table, &shifted(state, &k2, 0.5 * dt))?;
    let k4 = velocity(table, &shifted(state, &k3, dt))?;
    let mut next = state.clone();
    for (i, a) in next.lifted.iter_mut().enumerate() {
        for c in 0..2 {
            a[c] += dt / 6.0 * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]);
        }
    }
    next.t += dt;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeFrame {
    pub t: f64,
    pub lifted: Vec<[f64; 2]>,
    pub w: f64,
    pub impulse: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeTrajectory {
    pub degrees: Vec<i32>,
    pub frames: Vec<OdeFrame>,
    /// Time at which two vortices came within the collision radius, if they did.
    pub singularity: Option<f64>,
    pub w0: f64,
    pub p0: [f64; 2],
}

impl OdeTrajectory {
    pub fn max_w_drift(&self) -> f64 {
        self.frames.iter().map(|f| (f.w - self.w0).abs()).fold(0.0, f64::max)
    }

    pub fn max_impulse_drift(&self) -> f64 {
        self.frames
            .iter()
            .map(|f| (f.impulse[0] - self.p0[0]).hypot(f.impulse[1] - self.p0[1]))
            .fold(0.0, f64::max)
    }

    pub fn config_at(&self, frame: usize) -> Result<VortexConfig> {
        let pts = self.frames[frame]
            .lifted
            .iter()
            .map(|a| wrap(a[0], a[1]))
            .collect::<Result<Vec<_>>>()?;
        VortexConfig::with_general_degrees(pts, self.degrees.clone())
    }
}

/// Integrates to `t_final` (either direction) with step-doubling RK4 at local
/// tolerance `tol`, reporting states every `output_dt`.
pub fn evolve(
    table: &GreenTable,
    state: &OdeState,
    t_final: f64,
    tol: f64,
    output_dt: f64,
) -> Result<OdeTrajectory> {
    if !(tol > 0.0) || !(output_dt > 0.0) {
        return Err(invalid("tolerance and output spacing must be positive"));
    }
    let dir = if t_final >= state.t { 1.0 } else { -1.0 };
    let span = (t_final - state.t).abs();
    let outputs = (span / output_dt).round().max(1.0) as usize;
    let mut traj = OdeTrajectory {
        degrees: state.degrees.clone(),
        frames: Vec::new(),
        singularity: None,
        w0: state.w0,
        p0: state.p0,
    };
    let frame = |s: &OdeState| -> Result<OdeFrame> {
        Ok(OdeFrame {
            t: s.t,
            lifted: s.lifted.clone(),
            w: hamiltonian(table, s)?,
            impulse: impulse(s),
        })
    };
    traj.frames.push(frame(state)?);
    if state.len() < 2 {
        for k in 1..=outputs {
            let mut s = state.clone();
            s.t = state.t + dir * span * k as f64 / outputs as f64;
            traj.frames.push(frame(&s)?);
        }
        return Ok(traj);
    }
    let t0 = state.t;
    let mut s = state.clone();
    let mut h = (output_dt * 0.1).min(1e-3);
    for k in 1..=outputs {
        let target = t0 + dir * span * k as f64 / outputs as f64;
        while (target - s.t) * dir > 1e-15 {
            let hh = h.min((target - s.t).abs());
            let attempt = step(table, &s, dir * hh).and_then(|full| {
                let mid = step(table, &s, 0.5 * dir * hh)?;
                let two = step(table, &mid, 0.5 * dir * hh)?;
                Ok((full, two))
            });
            let (full, two) = match attempt {
                Ok(p) => p,
                Err(Error::SingularConfiguration(msg)) => {
                    log::info!("point-vortex flow became singular: {msg}");
                    traj.singularity = Some(s.t);
                    return Ok(traj);
                }
                Err(e) => return Err(e),
            };
            let err = full
                .lifted
                .iter()
                .zip(&two.lifted)
                .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
                .fold(0.0, f64::max)
                / 15.0;
            if err <= tol || hh < 1e-14 {
                s = two;
                if (target - s.t).abs() < 1e-13 {
                    s.t = target;
                }
                if s.min_separation() < COLLISION_RADIUS {
                    traj.singularity = Some(s.t);
                    return Ok(traj);
                }
            }
            let factor = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 2.0 };
            h = hh * factor.clamp(0.2, 2.0);
        }
        traj.frames.push(frame(&s)?);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::build_green;
    use crate::torus::GridSpec;

    fn table() -> GreenTable {
        build_green(GridSpec::new(128).unwrap(), 1e-3).unwrap()
    }

    #[test]
    fn dipole_shares_one_velocity() {
        let t = table();
        let cfg = VortexConfig::from_triples(&[(0.3, 0.4, 1), (0.55, 0.52, -1)]).unwrap();
        let s = OdeState::new(&t, &cfg).unwrap();
        let v = velocity(&t, &s).unwrap();
        assert!((v[0][0] - v[1][0]).abs() < 1e-12 && (v[0][1] - v[1][1]).abs() < 1e-12);
        let sep = min_image_diff(cfg.points()[0], cfg.points()[1]);
        let g = t.eval_grad_f(sep).unwrap();
        assert!((v[0][0] * g[0] + v[0][1] * g[1]).abs() < 1e-10);
    }

    #[test]
    fn close_dipole_speed() {
        let t = table();
        let cfg = VortexConfig::from_triples(&[(0.5, 0.5, 1), (0.55, 0.5, -1)]).unwrap();
        let s = OdeState::new(&t, &cfg).unwrap();
        let v = velocity(&t, &s).unwrap();
        let speed = v[0][0].hypot(v[0][1]);
        assert!((speed / (2.0 / 0.05) - 1.0).abs() < 0.03);
    }

    #[test]
    fn singular_close_pair() {
        let t = table();
        let cfg = VortexConfig::from_triples(&[(0.5, 0.5, 1), (0.5005, 0.5, -1)]).unwrap();
        let s = OdeState::new(&t, &cfg).unwrap();
        assert!(matches!(velocity(&t, &s), Err(Error::SingularConfiguration(_))));
    }

    #[test]
    fn general_degrees_use_the_scaled_hamiltonian_form() {
        let t = table();
        let cfg = VortexConfig::from_triples(&[(0.2, 0.3, 2), (0.6, 0.5, -1), (0.4, 0.8, -1)]).unwrap();
        let s = OdeState::new(&t, &cfg).unwrap();
        assert!(velocity(&t, &s).is_ok());
    }

    #[test]
    fn reversal_returns_home() {
        let t = table();
        let cfg = VortexConfig::from_triples(&[(0.2, 0.3, 1), (0.6, 0.5, -1), (0.45, 0.8, 1), (0.8, 0.15, -1)]).unwrap();
        let s = OdeState::new(&t, &cfg).unwrap();
        let fwd = evolve(&t, &s, 0.05, 1e-11, 0.01).unwrap();
        let mut end = s.clone();
        end.lifted = fwd.frames.last().unwrap().lifted.clone();
        end.t = 0.05;
        let back = evolve(&t, &end, 0.0, 1e-11, 0.01).unwrap();
        for (a, b) in back.frames.last().unwrap().lifted.iter().zip(&s.lifted) {
            assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8);
        }
        assert_eq!(fwd.frames.len(), 6);
    }
}
