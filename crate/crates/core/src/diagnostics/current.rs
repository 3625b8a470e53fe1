//! Current `j(u) = Im(conj(u) Du)`, Jacobian `Ju = det Du`, energy density and
//! the weak Jacobian pairing.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fft::Fft2;
use crate::field::{spectral_gradient, FieldGrid};
use crate::torus::{min_image_diff, TorusPoint};

/// Value, gradient and Hessian of a test function at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

type JetFn = dyn Fn([f64; 2]) -> Jet + Send + Sync;

/// A `C^2` periodic test function with analytic derivatives. `affine_near`
/// lists discs on which the Hessian vanishes identically.
pub struct TestFunction {
    jet: Box<JetFn>,
    affine_near: Vec<(TorusPoint, f64)>,
    support: Option<(TorusPoint, f64)>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("affine_near", &self.affine_near)
            .field("support", &self.support)
            .finish()
    }
}

impl TestFunction {
    pub fn new(jet: impl Fn([f64; 2]) -> Jet + Send + Sync + 'static) -> Self {
        TestFunction {
            jet: Box::new(jet),
            affine_near: Vec::new(),
            support: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| Jet {
            value: c,
            ..Jet::default()
        })
    }

    /// `eta(x) = nu . (x - a) S(|x - a|)`, affine on `B_rho(a)` and supported in `B_{2 rho}(a)`.
    pub fn localized_affine(centre: TorusPoint, nu: [f64; 2], rho: f64) -> Self {
        let jet = move |x: [f64; 2]| -> Jet {
            let p = TorusPoint::new(x[0], x[1]).expect("finite point");
            let d = min_image_diff(p, centre).as_array();
            let r = d[0].hypot(d[1]);
            let (s, s1, s2) = crate::util::radial_cutoff(r, rho, 2.0 * rho);
            let l = nu[0] * d[0] + nu[1] * d[1];
            if r <= rho {
                return Jet {
                    value: l,
                    grad: nu,
                    hess: [[0.0; 2]; 2],
                };
            }
            if r >= 2.0 * rho {
                return Jet::default();
            }
            let e = [d[0] / r, d[1] / r];
            let mut grad = [0.0; 2];
            let mut hess = [[0.0; 2]; 2];
            for a in 0..2 {
                grad[a] = nu[a] * s + l * s1 * e[a];
                for b in 0..2 {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    hess[a][b] = s1 * (nu[a] * e[b] + nu[b] * e[a])
                        + l * (s2 * e[a] * e[b] + s1 * (delta - e[a] * e[b]) / r);
                }
            }
            Jet {
                value: l * s,
                grad,
                hess,
            }
        };
        TestFunction {
            jet: Box::new(jet),
            affine_near: vec![(centre, rho)],
            support: Some((centre, 2.0 * rho)),
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> Jet {
        (self.jet)(x)
    }

    pub fn affine_near(&self) -> &[(TorusPoint, f64)] {
        &self.affine_near
    }

    /// Disc outside of which the function vanishes, when known.
    pub fn support(&self) -> Option<(TorusPoint, f64)> {
        self.support
    }

    /// Samples of the jet on every grid node.
    pub fn sample(&self, grid: crate::torus::GridSpec) -> Vec<Jet> {
        let n = grid.n();
        (0..grid.len())
            .into_par_iter()
            .map(|k| self.eval(grid.node(k % n, k / n)))
            .collect()
    }
}

/// Spectral derivatives of the field.
pub fn derivatives(field: &FieldGrid, fft: &Fft2) -> [Vec<Complex64>; 2] {
    field.gradient(fft)
}

/// `j(u) = (u x u_x1, u x u_x2)` with `a x b = Im(conj(a) b)`.
pub fn current_j(field: &FieldGrid, fft: &Fft2) -> [Vec<f64>; 2] {
    let [d1, d2] = field.gradient(fft);
    current_from(field.data(), &d1, &d2)
}

pub(crate) fn current_from(u: &[Complex64], d1: &[Complex64], d2: &[Complex64]) -> [Vec<f64>; 2] {
    let j1 = u.par_iter().zip(d1).map(|(u, d)| (u.conj() * d).im).collect();
    let j2 = u.par_iter().zip(d2).map(|(u, d)| (u.conj() * d).im).collect();
    [j1, j2]
}

/// Pointwise `Ju = det Du`.
pub fn jacobian(field: &FieldGrid, fft: &Fft2) -> Vec<f64> {
    let [d1, d2] = field.gradient(fft);
    d1.par_iter().zip(&d2).map(|(a, b)| (a.conj() * b).im).collect()
}

/// `int j(u)`, computed from Fourier coefficients as `sum_k 2 pi k |u_k|^2`.
pub fn mean_current(field: &FieldGrid, fft: &Fft2) -> [f64; 2] {
    let grid = field.grid();
    let n = grid.n();
    let mut hat = field.data().to_vec();
    fft.forward(&mut hat);
    let norm = 1.0 / ((n * n) as f64).powi(2);
    let mut p = [0.0; 2];
    for j in 0..n {
        let k2 = if j == n / 2 { 0 } else { grid.wavenumber(j) };
        for i in 0..n {
            let k1 = if i == n / 2 { 0 } else { grid.wavenumber(i) };
            let w = hat[j * n + i].norm_sqr();
            p[0] += k1 as f64 * w;
            p[1] += k2 as f64 * w;
        }
    }
    [2.0 * PI * p[0] * norm, 2.0 * PI * p[1] * norm]
}

/// `e(u) = |Du|^2 / 2 + (|u|^2 - 1)^2 / (4 epsilon^2)` on the grid.
pub fn energy_density(field: &FieldGrid, fft: &Fft2, epsilon: f64) -> Vec<f64> {
    let mut hat = field.data().to_vec();
    fft.forward(&mut hat);
    let [d1, d2] = spectral_gradient(field.grid(), &hat, fft);
    let c = 0.25 / (epsilon * epsilon);
    field
        .data()
        .par_iter()
        .zip(d1.par_iter().zip(&d2))
        .map(|(u, (a, b))| {
            let m = u.norm_sqr() - 1.0;
            0.5 * (a.norm_sqr() + b.norm_sqr()) + c * m * m
        })
        .collect()
}

/// `1/2 int (curl phi) . j(u)` with `curl phi = (phi_x2, -phi_x1)`; never differentiates `Ju`.
pub fn jacobian_pairing(field: &FieldGrid, fft: &Fft2, phi: &TestFunction) -> f64 {
    let grid = field.grid();
    let [j1, j2] = current_j(field, fft);
    let jets = phi.sample(grid);
    let h2 = grid.h() * grid.h();
    let mut acc = 0.0;
    for k in 0..grid.len() {
        let g = jets[k].grad;
        acc += g[1] * j1[k] - g[0] * j2[k];
    }
    0.5 * acc * h2
}

/// Regions for the energy measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Whole,
    Balls(Vec<(TorusPoint, f64)>),
    /// The torus minus the union of the balls.
    AvoidBalls(Vec<(TorusPoint, f64)>),
}

impl Region {
    pub fn contains(&self, p: TorusPoint) -> bool {
        let inside = |balls: &[(TorusPoint, f64)]| {
            balls
                .iter()
                .any(|(c, r)| crate::torus::geodesic_dist(p, *c) < *r)
        };
        match self {
            Region::Whole => true,
            Region::Balls(b) => inside(b),
            Region::AvoidBalls(b) => !inside(b),
        }
    }
}

/// `mu(region) = |log epsilon|^-1 int_region e(u)`.
pub fn energy_measure(field: &FieldGrid, fft: &Fft2, epsilon: f64, region: &Region) -> f64 {
    let grid = field.grid();
    let n = grid.n();
    let e = energy_density(field, fft, epsilon);
    let mut acc = 0.0;
    for (k, v) in e.iter().enumerate() {
        let [x, y] = grid.node(k % n, k / n);
        if region.contains(TorusPoint::new(x, y).expect("grid node")) {
            acc += v;
        }
    }
    acc * grid.h() * grid.h() / epsilon.ln().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::GridSpec;

    fn setup() -> (GridSpec, Fft2) {
        let g = GridSpec::new(64).unwrap();
        (g, Fft2::new(g))
    }

    #[test]
    fn plane_wave_current() {
        let (g, fft) = setup();
        let u = FieldGrid::from_fn(g, |[x, _]| Complex64::from_polar(1.0, 2.0 * PI * x));
        let [j1, j2] = current_j(&u, &fft);
        assert!(j1.iter().all(|v| (v - 2.0 * PI).abs() < 1e-10));
        assert!(j2.iter().all(|v| v.abs() < 1e-10));
        let p = mean_current(&u, &fft);
        assert!((p[0] - 2.0 * PI).abs() < 1e-12 && p[1].abs() < 1e-12);
    }

    #[test]
    fn real_fields_carry_no_current_and_gauge_does_not_matter() {
        let (g, fft) = setup();
        let u = FieldGrid::from_fn(g, |[x, y]| Complex64::new((2.0 * PI * x).sin() + (2.0 * PI * y).cos(), 0.0));
        let [j1, j2] = current_j(&u, &fft);
        assert!(j1.iter().chain(&j2).all(|v| v.abs() < 1e-12));
        let w = FieldGrid::from_fn(g, |[x, y]| {
            Complex64::new((2.0 * PI * x).cos(), (2.0 * PI * (x + 2.0 * y)).sin())
        });
        let rot = FieldGrid::new(g, w.data().iter().map(|z| z * Complex64::from_polar(1.0, 0.7)).collect()).unwrap();
        let (a, b) = (current_j(&w, &fft), current_j(&rot, &fft));
        for k in 0..g.len() {
            assert!((a[0][k] - b[0][k]).abs() < 1e-10 && (a[1][k] - b[1][k]).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobian_integrates_to_zero_and_matches_weak_form() {
        let (g, fft) = setup();
        let u = FieldGrid::from_fn(g, |[x, y]| {
            Complex64::new((2.0 * PI * x).cos() + 0.3, (2.0 * PI * y).sin() * (2.0 * PI * x).cos())
        });
        let ju = jacobian(&u, &fft);
        let total: f64 = ju.iter().sum::<f64>() * g.h() * g.h();
        assert!(total.abs() < 1e-12);
        let phi = TestFunction::new(|[x, y]| Jet {
            value: (2.0 * PI * x).sin() * (2.0 * PI * y).cos(),
            grad: [
                2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).cos(),
                -2.0 * PI * (2.0 * PI * x).sin() * (2.0 * PI * y).sin(),
            ],
            hess: [[0.0; 2]; 2],
        });
        let weak = jacobian_pairing(&u, &fft, &phi);
        let jets = phi.sample(g);
        let strong: f64 = jets.iter().zip(&ju).map(|(p, j)| p.value * j).sum::<f64>() * g.h() * g.h();
        assert!((weak - strong).abs() < 1e-10, "{weak} {strong}");
        assert!(jacobian_pairing(&u, &fft, &TestFunction::constant(3.0)).abs() < 1e-14);
    }

    #[test]
    fn energy_of_constants() {
        let (g, fft) = setup();
        let one = FieldGrid::constant(g, Complex64::new(1.0, 0.0));
        let zero = FieldGrid::constant(g, Complex64::default());
        let e = 0.1;
        let s = |f: &FieldGrid| energy_density(f, &fft, e).iter().sum::<f64>() * g.h() * g.h();
        assert_eq!(s(&one), 0.0);
        assert!((s(&zero) - 0.25 / (e * e)).abs() < 1e-10);
        assert_eq!(energy_measure(&one, &fft, e, &Region::Whole), 0.0);
    }

    #[test]
    fn localized_affine_derivatives() {
        let c = TorusPoint::new(0.4, 0.6).unwrap();
        let eta = TestFunction::localized_affine(c, [0.6, -0.8], 0.05);
        let step = 1e-6;
        for x in [[0.47, 0.6], [0.4, 0.52], [0.46, 0.66], [0.43, 0.58]] {
            let j = eta.eval(x);
            let jp = eta.eval([x[0] + step, x[1]]);
            let jm = eta.eval([x[0] - step, x[1]]);
            assert!(((jp.value - jm.value) / (2.0 * step) - j.grad[0]).abs() < 1e-6);
            assert!(((jp.grad[1] - jm.grad[1]) / (2.0 * step) - j.hess[0][1]).abs() < 1e-4);
            assert!(((jp.grad[0] - jm.grad[0]) / (2.0 * step) - j.hess[0][0]).abs() < 1e-4);
        }
        assert_eq!(eta.eval([0.41, 0.6]).hess, [[0.0; 2]; 2]);
    }
}
