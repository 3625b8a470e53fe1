//! Strang-split Fourier integrator for `i u_t = Laplace u - epsilon^-2 (|u|^2 - 1) u`
//! and the functionals it conserves.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::current::{energy_density, mean_current};
use crate::error::{invalid, Error, Result};
use crate::fft::Fft2;
use crate::field::{spectral_gradient, FieldGrid, Snapshot};
use crate::torus::GridSpec;

/// `max |u|` above which a run is declared numerically blown up.
pub const BLOW_UP_MODULUS: f64 = 10.0;

/// Largest linear phase per step `4 pi^2 |k|^2 dt` allowed for retained modes.
///
/// Around the `|u| = 1` background the split step amplifies a mode by about
/// `1 + dt / epsilon^2` per step when its phase sits just below a multiple of
/// `pi`, so every retained mode is kept below the first resonance.
pub const MAX_LINEAR_PHASE: f64 = 2.5;

/// Stability limit of the split step on `grid`.
pub fn stable_dt(grid: GridSpec, dealias: bool) -> f64 {
    let n = grid.n() as f64;
    let kmax = if dealias { (n / 3.0).floor() } else { n / 2.0 };
    MAX_LINEAR_PHASE / (4.0 * PI * PI * 2.0 * kmax * kmax)
}

/// `0.1 epsilon^2`, capped by the stability limit of the dealiased scheme.
pub fn default_dt(epsilon: f64, grid: GridSpec) -> f64 {
    (0.1 * epsilon * epsilon).min(stable_dt(grid, true))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedRecord {
    pub t: f64,
    pub energy: f64,
    pub mass: f64,
    pub momentum: [f64; 2],
}

pub struct SolverState {
    field: FieldGrid,
    epsilon: f64,
    t: f64,
    dt: f64,
    step_count: u64,
    dealias: bool,
    fft: Fft2,
    log: Vec<ConservedRecord>,
}

impl std::fmt::Debug for SolverState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolverState")
            .field("epsilon", &self.epsilon)
            .field("t", &self.t)
            .field("dt", &self.dt)
            .field("step_count", &self.step_count)
            .finish()
    }
}

impl SolverState {
    pub fn new(field: FieldGrid, epsilon: f64, t0: f64, dt: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(invalid(format!("epsilon = {epsilon} must be positive")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("dt = {dt} must be positive")));
        }
        if dt > stable_dt(field.grid(), true) {
            log::warn!(
                "dt = {dt:.3e} exceeds the split-step stability limit {:.3e}",
                stable_dt(field.grid(), true)
            );
        }
        if !field.is_finite() {
            return Err(invalid("initial field is not finite"));
        }
        let fft = Fft2::new(field.grid());
        let mut state = SolverState {
            field,
            epsilon,
            t: t0,
            dt,
            step_count: 0,
            dealias: true,
            fft,
            log: Vec::new(),
        };
        state.project();
        state.record();
        Ok(state)
    }

    pub fn from_snapshot(snap: Snapshot, dt: f64) -> Result<Self> {
        Self::new(snap.field, snap.epsilon, snap.time, dt)
    }

    /// Switches the 2/3-rule truncation after nonlinear substeps (on by
    /// default). The field is projected whenever truncation is on, which keeps
    /// the scheme exactly reversible.
    pub fn set_dealias(&mut self, on: bool) {
        self.dealias = on;
        self.project();
    }

    /// Reverses the direction of time; the scheme is symmetric, so stepping
    /// with `-dt` undoes a step with `dt`.
    pub fn reverse(&mut self) {
        self.dt = -self.dt;
    }

    pub fn field(&self) -> &FieldGrid {
        &self.field
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    pub fn conserved_log(&self) -> &[ConservedRecord] {
        &self.log
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            field: self.field.clone(),
            epsilon: self.epsilon,
            time: self.t,
        }
    }

    /// Appends the current conserved quantities to the log.
    pub fn record(&mut self) -> ConservedRecord {
        let rec = ConservedRecord {
            t: self.t,
            energy: energy(&self.field, &self.fft, self.epsilon),
            mass: mass(&self.field),
            momentum: momentum(&self.field, &self.fft),
        };
        self.log.push(rec);
        rec
    }

    fn nonlinear(&mut self, tau: f64) {
        let c = tau / (self.epsilon * self.epsilon);
        self.field
            .data_mut()
            .par_iter_mut()
            .for_each(|u| *u *= Complex64::from_polar(1.0, c * (u.norm_sqr() - 1.0)));
    }

    fn truncate(&self, hat: &mut [Complex64]) {
        let grid = self.field.grid();
        let n = grid.n();
        let cut = n as i64 / 3;
        hat.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            let k2 = grid.wavenumber(j).abs();
            for (i, z) in row.iter_mut().enumerate() {
                if k2 > cut || grid.wavenumber(i).abs() > cut {
                    *z = Complex64::default();
                }
            }
        });
    }

    fn project(&mut self) {
        if self.dealias {
            let mut hat = self.field.data().to_vec();
            self.fft.forward(&mut hat);
            self.truncate(&mut hat);
            self.fft.inverse(&mut hat);
            self.field.data_mut().copy_from_slice(&hat);
        }
    }

    /// One Strang step: half nonlinear phase, exact linear propagator, half nonlinear phase.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.dt;
        let grid = self.field.grid();
        let n = grid.n();
        self.nonlinear(0.5 * dt);
        let mut hat = self.field.data().to_vec();
        self.fft.forward(&mut hat);
        if self.dealias {
            self.truncate(&mut hat);
        }
        hat.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            let k2 = grid.wavenumber(j) as f64;
            for (i, z) in row.iter_mut().enumerate() {
                let k1 = grid.wavenumber(i) as f64;
                *z *= Complex64::from_polar(1.0, 4.0 * PI * PI * (k1 * k1 + k2 * k2) * dt);
            }
        });
        self.fft.inverse(&mut hat);
        self.field.data_mut().copy_from_slice(&hat);
        self.nonlinear(0.5 * dt);
        self.project();
        self.step_count += 1;
        self.t += dt;
        let max = self.field.max_modulus();
        if !max.is_finite() {
            return Err(Error::BlowUp {
                step: self.step_count,
                reason: "non-finite values".into(),
            });
        }
        if max > BLOW_UP_MODULUS {
            return Err(Error::BlowUp {
                step: self.step_count,
                reason: format!("max |u| = {max:.3e}"),
            });
        }
        Ok(())
    }

    pub fn steps(&mut self, count: u64) -> Result<()> {
        for _ in 0..count {
            self.step()?;
        }
        Ok(())
    }

    /// Advances to `t_final`, calling `on_snapshot` at the start and every
    /// `snapshot_every`. The step is shrunk so snapshots land on the time mesh.
    pub fn evolve(
        &mut self,
        t_final: f64,
        snapshot_every: f64,
        mut on_snapshot: impl FnMut(&SolverState) -> Result<()>,
    ) -> Result<()> {
        if !(t_final > self.t) {
            return Err(invalid(format!("t_final = {t_final} must exceed t = {}", self.t)));
        }
        if !(snapshot_every > 0.0) {
            return Err(invalid("snapshot_every must be positive"));
        }
        let per = (snapshot_every / self.dt.abs()).ceil().max(1.0) as u64;
        self.dt = snapshot_every / per as f64;
        let frames = ((t_final - self.t) / snapshot_every).round().max(1.0) as u64;
        let t0 = self.t;
        on_snapshot(self)?;
        for f in 1..=frames {
            self.steps(per)?;
            self.t = t0 + f as f64 * snapshot_every;
            self.record();
            on_snapshot(self)?;
        }
        Ok(())
    }
}

/// `I[u] = int |Du|^2 / 2 + (|u|^2 - 1)^2 / (4 epsilon^2)`, kinetic part from Fourier coefficients.
pub fn energy(field: &FieldGrid, fft: &Fft2, epsilon: f64) -> f64 {
    let grid = field.grid();
    let n = grid.n();
    let mut hat = field.data().to_vec();
    fft.forward(&mut hat);
    let mut kinetic = 0.0;
    for j in 0..n {
        let k2 = grid.wavenumber(j) as f64;
        for i in 0..n {
            let k1 = grid.wavenumber(i) as f64;
            kinetic += (k1 * k1 + k2 * k2) * hat[j * n + i].norm_sqr();
        }
    }
    kinetic *= 2.0 * PI * PI / ((n * n) as f64).powi(2);
    let potential: f64 = field
        .data()
        .iter()
        .map(|u| {
            let m = u.norm_sqr() - 1.0;
            m * m
        })
        .sum::<f64>()
        / (n * n) as f64;
    kinetic + potential / (4.0 * epsilon * epsilon)
}

/// `int |u|^2`.
pub fn mass(field: &FieldGrid) -> f64 {
    field.data().iter().map(|u| u.norm_sqr()).sum::<f64>() / field.grid().len() as f64
}

/// `int j(u)`.
pub fn momentum(field: &FieldGrid, fft: &Fft2) -> [f64; 2] {
    mean_current(field, fft)
}

/// Mismatch in the local energy law `d/dt e(u) = div (u_xi . u_t)` across one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxResidual {
    /// Max-norm of `(e1 - e0)/dt - div flux` at the midpoint.
    pub absolute: f64,
    /// `absolute` relative to the max-norm of `(e1 - e0)/dt`.
    pub relative: f64,
}

/// Relative residuals above this flag an under-resolved run.
pub const FLUX_RESIDUAL_THRESHOLD: f64 = 0.05;

pub fn energy_flux_residual(a: &Snapshot, b: &Snapshot) -> Result<FluxResidual> {
    let grid = a.field.grid();
    if b.field.grid() != grid || a.epsilon != b.epsilon {
        return Err(invalid("snapshots differ in grid or epsilon"));
    }
    let dt = b.time - a.time;
    if dt == 0.0 {
        return Err(invalid("snapshots share a time"));
    }
    let fft = Fft2::new(grid);
    let e0 = energy_density(&a.field, &fft, a.epsilon);
    let e1 = energy_density(&b.field, &fft, a.epsilon);
    let um: Vec<Complex64> = a.field.data().iter().zip(b.field.data()).map(|(x, y)| 0.5 * (x + y)).collect();
    let ut: Vec<Complex64> = a.field.data().iter().zip(b.field.data()).map(|(x, y)| (y - x) / dt).collect();
    let mut hat = um.clone();
    fft.forward(&mut hat);
    let [d1, d2] = spectral_gradient(grid, &hat, &fft);
    let mut flux1: Vec<Complex64> = d1.iter().zip(&ut).map(|(d, t)| Complex64::new((d.conj() * t).re, 0.0)).collect();
    let mut flux2: Vec<Complex64> = d2.iter().zip(&ut).map(|(d, t)| Complex64::new((d.conj() * t).re, 0.0)).collect();
    fft.forward(&mut flux1);
    fft.forward(&mut flux2);
    let g1 = spectral_gradient(grid, &flux1, &fft)[0].clone();
    let g2 = spectral_gradient(grid, &flux2, &fft)[1].clone();
    let mut abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..grid.len() {
        let de = (e1[k] - e0[k]) / dt;
        let div = g1[k].re + g2[k].re;
        abs = abs.max((de - div).abs());
        scale = scale.max(de.abs());
    }
    let relative = if scale > 0.0 { abs / scale } else { 0.0 };
    Ok(FluxResidual {
        absolute: abs,
        relative,
    })
}

/// Grid size from the resolution policy `h <= epsilon / 4`, at least 128.
pub fn default_grid(epsilon: f64) -> Result<GridSpec> {
    GridSpec::default_for_epsilon(epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_oscillates_exactly() {
        let grid = GridSpec::new(16).unwrap();
        let (rho, theta, eps) = (0.8, 0.4, 0.1);
        let u = FieldGrid::constant(grid, Complex64::from_polar(rho, theta));
        let mut s = SolverState::new(u, eps, 0.0, 1e-3).unwrap();
        s.steps(50).unwrap();
        let expect = Complex64::from_polar(rho, theta + (rho * rho - 1.0) * s.time() / (eps * eps));
        for z in s.field().data() {
            assert!((z - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn functionals_of_simple_fields() {
        let grid = GridSpec::new(32).unwrap();
        let fft = Fft2::new(grid);
        let one = FieldGrid::constant(grid, Complex64::new(1.0, 0.0));
        assert_eq!(energy(&one, &fft, 0.1), 0.0);
        assert!((mass(&one) - 1.0).abs() < 1e-15);
        assert_eq!(momentum(&one, &fft), [0.0, 0.0]);
        let zero = FieldGrid::constant(grid, Complex64::default());
        assert!((energy(&zero, &fft, 0.1) - 25.0).abs() < 1e-12);
        let wave = FieldGrid::from_fn(grid, |[x, _]| Complex64::from_polar(1.0, 2.0 * PI * x));
        let p = momentum(&wave, &fft);
        assert!((p[0] - 2.0 * PI).abs() < 1e-12 && p[1].abs() < 1e-12);
        assert!((energy(&wave, &fft, 0.1) - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn unit_modulus_nonlinear_substep_is_identity() {
        let grid = GridSpec::new(32).unwrap();
        let wave = FieldGrid::from_fn(grid, |[x, y]| Complex64::from_polar(1.0, 2.0 * PI * (x - 2.0 * y)));
        let mut s = SolverState::new(wave.clone(), 0.1, 0.0, 1e-3).unwrap();
        s.nonlinear(0.3);
        for (a, b) in s.field().data().iter().zip(wave.data()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn blow_up_guard() {
        let grid = GridSpec::new(16).unwrap();
        let u = FieldGrid::constant(grid, Complex64::new(20.0, 0.0));
        let mut s = SolverState::new(u, 0.1, 0.0, 1e-3).unwrap();
        assert!(matches!(s.step(), Err(Error::BlowUp { step: 1, .. })));
    }

    #[test]
    fn flux_residual_vanishes_for_constants() {
        let grid = GridSpec::new(16).unwrap();
        let u = FieldGrid::constant(grid, Complex64::from_polar(0.9, 0.1));
        let mut s = SolverState::new(u, 0.1, 0.0, 1e-3).unwrap();
        let a = s.snapshot();
        s.step().unwrap();
        let r = energy_flux_residual(&a, &s.snapshot()).unwrap();
        assert!(r.absolute < 1e-9);
    }

    #[test]
    fn evolve_lands_on_the_snapshot_mesh() {
        let grid = GridSpec::new(16).unwrap();
        let u = FieldGrid::constant(grid, Complex64::from_polar(0.9, 0.1));
        let mut s = SolverState::new(u, 0.1, 0.0, 3e-3).unwrap();
        let mut times = Vec::new();
        s.evolve(0.1, 0.025, |st| {
            times.push(st.time());
            Ok(())
        })
        .unwrap();
        assert_eq!(times.len(), 5);
        assert!((times[4] - 0.1).abs() < 1e-15);
        assert_eq!(s.conserved_log().len(), 5);
    }
}
