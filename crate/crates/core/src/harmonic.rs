//! The potential `Phi`, the canonical harmonic map `H(.; a, d)`, the annulus
//! energy expansion and near-minimal initial data.
//!
//! `H` is built in closed form. With `Theta(z) = prod_i theta_1(pi (z - a_i))^(d_i)`,
//! the phase `arg Theta + kappa . x` has current
//! `-curl Phi + (2 pi B + kappa_1, 2 pi C + kappa_2)`, where `C` and `B` are the
//! `x` and `y` components of the dipole moment `sum d_i a_i`. Periodicity
//! forces `kappa_1` and `kappa_2 + 2 pi C` into `2 pi Z`, so a single-valued
//! map with current exactly `-curl Phi` exists only when the dipole moment is
//! a lattice vector. Otherwise the smallest admissible background current is
//! used and reported.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{VortexConfig, COINCIDENCE_TOL};
use crate::diagnostics::current::mean_current;
use crate::error::{invalid, Error, Result};
use crate::fft::Fft2;
use crate::field::FieldGrid;
use crate::green::{green_gradient, GreenTable};
use crate::profile::CoreProfile;
use crate::theta::theta1;
use crate::torus::{curl_of_gradient, min_image_diff, wrap, GridSpec, TorusPoint};
use crate::util::{gauss_legendre, radial_cutoff};

/// Tolerance on the dipole moment for calling a configuration lattice-consistent.
pub const LATTICE_TOL: f64 = 1e-9;

/// `Phi(x) = sum_i d_i F(x - a_i)` sampled on the grid.
pub fn potential_phi(table: &GreenTable, cfg: &VortexConfig, grid: GridSpec) -> Result<Vec<f64>> {
    let n = grid.n();
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let [x, y] = grid.node(k % n, k / n);
            let p = TorusPoint::new(x, y)?;
            let mut phi = 0.0;
            for (a, d) in cfg.points().iter().zip(cfg.degrees()) {
                phi += *d as f64 * table.eval_f(min_image_diff(p, *a))?;
            }
            Ok(phi)
        })
        .collect()
}

/// Closed-form unit-modulus map with prescribed vortices.
#[derive(Debug, Clone)]
pub struct CanonicalMap {
    centres: Vec<Complex64>,
    degrees: Vec<i32>,
    kappa: [f64; 2],
    background: [f64; 2],
    gauge: f64,
}

impl CanonicalMap {
    /// The canonical harmonic map, with zero mean current and `arg H(0) = alpha`.
    /// Fails with a construction error when `sum d_i a_i` is not a lattice vector,
    /// since then no single-valued map has current `-curl Phi`.
    pub fn new(cfg: &VortexConfig, alpha: f64) -> Result<Self> {
        if !cfg.is_lattice_consistent(LATTICE_TOL) {
            let p = cfg.dipole_moment();
            return Err(Error::Construction(format!(
                "phase defect around the torus cycles: dipole moment ({:.6}, {:.6}) is not a lattice vector",
                p[0], p[1]
            )));
        }
        Self::lattice_minimal(cfg, alpha)
    }

    /// The map whose current is `-curl Phi + c` with the smallest admissible
    /// constant background `c`; equals [`CanonicalMap::new`] when `c = 0`.
    pub fn lattice_minimal(cfg: &VortexConfig, alpha: f64) -> Result<Self> {
        let [cx, by] = cfg.dipole_moment();
        let kappa = [-2.0 * PI * by.round(), 2.0 * PI * (cx.round() - cx)];
        let background = [2.0 * PI * (by - by.round()), kappa[1]];
        let mut map = CanonicalMap {
            centres: cfg
                .points()
                .iter()
                .map(|p| Complex64::new(p.x1(), p.x2()))
                .collect(),
            degrees: cfg.degrees().to_vec(),
            kappa,
            background,
            gauge: 0.0,
        };
        let origin = TorusPoint::new(0.0, 0.0)?;
        if cfg
            .points()
            .iter()
            .any(|a| crate::torus::geodesic_dist(*a, origin) < COINCIDENCE_TOL)
        {
            return Err(invalid("a vortex sits on the gauge reference corner"));
        }
        map.gauge = alpha - map.raw_phase([0.0, 0.0]);
        Ok(map)
    }

    /// Constant background current `c`, zero for the canonical map.
    pub fn background(&self) -> [f64; 2] {
        self.background
    }

    fn raw_phase(&self, x: [f64; 2]) -> f64 {
        let z = Complex64::new(x[0], x[1]);
        let mut acc = Complex64::new(1.0, 0.0);
        for (a, &d) in self.centres.iter().zip(&self.degrees) {
            let t = theta1((z - a) * PI);
            let t = if d > 0 { t } else { t.conj() };
            for _ in 0..d.unsigned_abs() {
                acc *= t;
            }
            // keep the running product away from under- and overflow
            let m = acc.norm();
            if m > 0.0 {
                acc /= m;
            }
        }
        acc.arg() + self.kappa[0] * x[0] + self.kappa[1] * x[1]
    }

    /// Phase of `H` at `x` (any representative; the result is defined mod `2 pi`).
    pub fn phase(&self, x: [f64; 2]) -> f64 {
        let p = [x[0] - x[0].floor(), x[1] - x[1].floor()];
        self.raw_phase(p) + self.gauge
    }

    pub fn value(&self, x: [f64; 2]) -> Complex64 {
        Complex64::from_polar(1.0, self.phase(x))
    }

    /// `j(H)(x) = -curl Phi(x) + c`.
    pub fn current(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let p = wrap(x[0], x[1])?;
        let mut j = self.background;
        for (a, &d) in self.centres.iter().zip(&self.degrees) {
            let v = min_image_diff(p, TorusPoint::new(a.re, a.im)?);
            if v.is_zero() {
                return Err(Error::SingularPoint);
            }
            let c = curl_of_gradient(green_gradient(v.v1, v.v2));
            j[0] -= d as f64 * c[0];
            j[1] -= d as f64 * c[1];
        }
        Ok(j)
    }

    pub fn sample(&self, grid: GridSpec) -> FieldGrid {
        FieldGrid::from_fn(grid, |x| self.value(x))
    }
}

/// Samples of the canonical harmonic map with `arg H(0) = gauge_alpha`.
pub fn canonical_map(cfg: &VortexConfig, grid: GridSpec, gauge_alpha: f64) -> Result<FieldGrid> {
    Ok(CanonicalMap::new(cfg, gauge_alpha)?.sample(grid))
}

/// `int_{T^2 minus discs B_rho(a_i)} |D H|^2 / 2` for the canonical current
/// `-curl Phi`, evaluated by a smooth partition of unity: a periodic
/// trapezoid rule away from the vortices and polar Gauss rules on the
/// annuli around them.
pub fn annulus_energy(cfg: &VortexConfig, rho: f64) -> Result<f64> {
    annulus_energy_with(cfg, rho, 512)
}

pub fn annulus_energy_with(cfg: &VortexConfig, rho: f64, n: usize) -> Result<f64> {
    if cfg.is_empty() {
        return Ok(0.0);
    }
    if !(rho > 0.0 && rho < cfg.separation_radius()) {
        return Err(invalid(format!(
            "rho = {rho} must lie in (0, {}) (a quarter of the minimal separation)",
            cfg.separation_radius()
        )));
    }
    let outer = (0.45 * cfg.min_separation()).min(0.3);
    let inner = 0.5 * outer;
    let pts = cfg.points();
    let density = |p: TorusPoint| -> f64 {
        let mut g = [0.0; 2];
        for (a, &d) in pts.iter().zip(cfg.degrees()) {
            let v = min_image_diff(p, *a);
            let df = green_gradient(v.v1, v.v2);
            g[0] += d as f64 * df[0];
            g[1] += d as f64 * df[1];
        }
        0.5 * (g[0] * g[0] + g[1] * g[1])
    };
    let weight_far = |p: TorusPoint| -> f64 {
        1.0 - pts
            .iter()
            .map(|a| radial_cutoff(min_image_diff(p, *a).norm(), inner, outer).0)
            .sum::<f64>()
    };

    let grid = GridSpec::new(n)?;
    let h2 = grid.h() * grid.h();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..n {
                let [x, y] = grid.node(i, j);
                let p = TorusPoint::new(x, y).expect("grid node");
                let w = weight_far(p);
                if w > 0.0 {
                    acc += w * density(p);
                }
            }
            acc
        })
        .collect();
    let mut total = rows.iter().sum::<f64>() * h2;

    let (gx, gw) = gauss_legendre(10);
    let n_theta = 256;
    let s_lo = rho.ln();
    let s_hi = outer.ln();
    let panels = ((s_hi - s_lo) / 0.1).ceil().max(1.0) as usize;
    let width = (s_hi - s_lo) / panels as f64;
    for a in pts {
        let mut acc = 0.0;
        for p in 0..panels {
            for (x, w) in gx.iter().zip(&gw) {
                let s = s_lo + (p as f64 + 0.5 * (x + 1.0)) * width;
                let r = s.exp();
                let chi = radial_cutoff(r, inner, outer).0;
                let mut ring = 0.0;
                for k in 0..n_theta {
                    let t = 2.0 * PI * k as f64 / n_theta as f64;
                    let q = a.translate([r * t.cos(), r * t.sin()]);
                    ring += density(q);
                }
                acc += 0.5 * width * w * chi * r * r * ring * 2.0 * PI / n_theta as f64;
            }
        }
        total += acc;
    }
    Ok(total)
}

/// Near-minimal initial data together with its construction metadata.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub field: FieldGrid,
    pub epsilon: f64,
    /// Background current of the phase map used (zero for lattice-consistent configurations).
    pub background: [f64; 2],
    /// Measured `int j(v)` of the output.
    pub mean_current: [f64; 2],
}

// the core factor is blended to 1 between these distances from each vortex
const CORE_BLEND_INNER: f64 = 0.25;
const CORE_BLEND_OUTER: f64 = 0.4;

/// `v(x) = H(x) prod_i [1 - chi(r_i) (1 - f(r_i / epsilon))]` with `H` the
/// lattice-minimal phase map and `chi` a smooth cutoff, so that `v` is smooth
/// and periodic.
pub fn make_initial_data(
    cfg: &VortexConfig,
    epsilon: f64,
    grid: GridSpec,
    profile: &CoreProfile,
) -> Result<InitialData> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon = {epsilon} must be positive")));
    }
    if grid.h() > epsilon / 2.0 {
        return Err(Error::Resolution(format!(
            "h = {} exceeds epsilon / 2 = {}",
            grid.h(),
            epsilon / 2.0
        )));
    }
    if grid.h() > epsilon / 4.0 {
        log::warn!("h = {} is coarser than the recommended epsilon / 4", grid.h());
    }
    if cfg.degrees().iter().any(|d| d.abs() != 1) {
        return Err(invalid("initial data supports unit degrees only"));
    }
    let map = CanonicalMap::lattice_minimal(cfg, 0.0)?;
    if !cfg.is_lattice_consistent(LATTICE_TOL) {
        log::warn!(
            "configuration is not lattice-consistent: background current ({:.4}, {:.4})",
            map.background()[0],
            map.background()[1]
        );
    }
    let field = FieldGrid::from_fn(grid, |x| {
        let p = TorusPoint::new(x[0], x[1]).expect("grid node");
        let mut amp = 1.0;
        for a in cfg.points() {
            let r = min_image_diff(p, *a).norm();
            let chi = radial_cutoff(r, CORE_BLEND_INNER, CORE_BLEND_OUTER).0;
            if chi > 0.0 {
                amp *= 1.0 - chi * (1.0 - profile.value(r / epsilon));
            }
        }
        map.value(x) * amp
    });
    let fft = Fft2::new(grid);
    let mean = mean_current(&field, &fft);
    Ok(InitialData {
        field,
        epsilon,
        background: map.background(),
        mean_current: mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::build_green;
    use crate::profile::ProfileKind;
    use crate::util::halton;

    fn square(shift: f64) -> VortexConfig {
        VortexConfig::from_triples(&[
            (0.25 + shift, 0.25 + shift, 1),
            (0.25 + shift, 0.75 + shift, -1),
            (0.75 + shift, 0.75 + shift, 1),
            (0.75 + shift, 0.25 + shift, -1),
        ])
        .unwrap()
    }

    #[test]
    fn dipole_has_no_canonical_map() {
        let dipole = VortexConfig::from_triples(&[(0.25, 0.5, 1), (0.75, 0.5, -1)]).unwrap();
        assert!(matches!(CanonicalMap::new(&dipole, 0.0), Err(Error::Construction(_))));
        let m = CanonicalMap::lattice_minimal(&dipole, 0.0).unwrap();
        assert!((m.background()[0]).abs() < 1e-12);
        assert!((m.background()[1].abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn phase_gradient_is_the_current() {
        let cfg = square(0.013);
        let m = CanonicalMap::new(&cfg, 0.3).unwrap();
        assert_eq!(m.background(), [0.0, 0.0]);
        let step = 1e-6;
        for k in 1..60 {
            let x = [halton(k, 2), halton(k, 3)];
            if cfg
                .points()
                .iter()
                .any(|a| crate::torus::geodesic_dist(*a, wrap(x[0], x[1]).unwrap()) < 0.02)
            {
                continue;
            }
            let j = m.current(x).unwrap();
            let wrapd = |a: f64, b: f64| {
                let d = a - b;
                d - 2.0 * PI * (d / (2.0 * PI)).round()
            };
            let d1 = wrapd(m.phase([x[0] + step, x[1]]), m.phase([x[0] - step, x[1]])) / (2.0 * step);
            let d2 = wrapd(m.phase([x[0], x[1] + step]), m.phase([x[0], x[1] - step])) / (2.0 * step);
            assert!((d1 - j[0]).abs() < 1e-5 * (1.0 + j[0].abs()), "{x:?}");
            assert!((d2 - j[1]).abs() < 1e-5 * (1.0 + j[1].abs()), "{x:?}");
        }
    }

    #[test]
    fn map_is_periodic_and_gauged() {
        for cfg in [
            square(0.013),
            VortexConfig::from_triples(&[(0.25, 0.5, 1), (0.75, 0.5, -1)]).unwrap(),
            VortexConfig::from_triples(&[(0.1, 0.3, 2), (0.6, 0.8, -1), (0.35, 0.45, -1)]).unwrap(),
        ] {
            let m = CanonicalMap::lattice_minimal(&cfg, 1.1).unwrap();
            assert!((m.value([0.0, 0.0]) - Complex64::from_polar(1.0, 1.1)).norm() < 1e-12);
            for t in [0.05, 0.37, 0.81] {
                let a = m.value([1.0 - 1e-10, t]);
                let b = m.value([1e-10, t]);
                assert!((a - b).norm() < 1e-6);
                let a = m.value([t, 1.0 - 1e-10]);
                let b = m.value([t, 1e-10]);
                assert!((a - b).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn potential_is_odd_for_a_dipole_and_zero_for_none() {
        let table = build_green(GridSpec::new(64).unwrap(), 1e-3).unwrap();
        let grid = GridSpec::new(32).unwrap();
        let h = grid.h();
        let dipole =
            VortexConfig::from_triples(&[(0.25 + h / 2.0, 0.5 + h / 2.0, 1), (0.75 + h / 2.0, 0.5 + h / 2.0, -1)])
                .unwrap();
        let phi = potential_phi(&table, &dipole, grid).unwrap();
        // reflection x -> 1 + h - x swaps the vortices and maps node i to n + 1 - i
        let n = grid.n();
        for j in 0..n {
            for i in 0..n {
                let mirror = (n + 1 - i) % n;
                assert!((phi[j * n + i] + phi[j * n + mirror]).abs() < 1e-10);
            }
        }
        let mean: f64 = phi.iter().sum::<f64>() / phi.len() as f64;
        assert!(mean.abs() < 1e-2);
        let empty = potential_phi(&table, &VortexConfig::empty(), grid).unwrap();
        assert!(empty.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn annulus_energy_rejects_large_rho() {
        let cfg = square(0.0);
        assert!(annulus_energy(&cfg, 0.2).is_err());
        assert!(annulus_energy(&cfg, 0.0).is_err());
    }

    #[test]
    fn annulus_energy_doubling_rho() {
        let cfg = square(0.0);
        let a = annulus_energy_with(&cfg, 0.02, 256).unwrap();
        let b = annulus_energy_with(&cfg, 0.04, 256).unwrap();
        let m = 4.0;
        assert!(((a - b) / (m * PI * 2f64.ln()) - 1.0).abs() < 0.02);
    }

    #[test]
    fn initial_data_has_unit_modulus_far_from_cores() {
        let profile = CoreProfile::new(ProfileKind::Numerical).unwrap();
        let eps = 0.05;
        let grid = GridSpec::new(128).unwrap();
        let cfg = square(0.01);
        let data = make_initial_data(&cfg, eps, grid, &profile).unwrap();
        let n = grid.n();
        for k in 0..grid.len() {
            let [x, y] = grid.node(k % n, k / n);
            let p = TorusPoint::new(x, y).unwrap();
            let near = cfg.points().iter().map(|a| crate::torus::geodesic_dist(p, *a)).fold(1.0, f64::min);
            if near >= 8.0 * eps {
                assert!((data.field.data()[k].norm() - 1.0).abs() < 1e-2);
            }
        }
        assert!(make_initial_data(&cfg, 0.01, grid, &profile).is_err());
    }
}
