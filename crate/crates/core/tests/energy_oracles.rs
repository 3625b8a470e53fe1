//! Core and annulus energies against brute-force two-dimensional quadrature.

use std::f64::consts::PI;

use gls_vortex::harmonic::annulus_energy;
use gls_vortex::profile::{i_eps_rho, CoreProfile, ProfileKind};
use gls_vortex::{build_green, renormalized_energy, GridSpec, VortexConfig};
use num_complex::Complex64;

#[test]
fn core_energy_matches_cartesian_quadrature() {
    let p = CoreProfile::new(ProfileKind::Numerical).unwrap();
    let (eps, rho) = (0.01, 0.1);
    let expect = i_eps_rho(&p, eps, rho).unwrap();
    // u = f(r/eps) (x + iy)/r; derivatives by central differences of u itself
    let u = |x: f64, y: f64| {
        let r = x.hypot(y);
        Complex64::new(x, y) * (p.value(r / eps) / r)
    };
    let m = 2400;
    let h = 2.0 * rho / m as f64;
    let d = 1e-3 * eps;
    let mut acc = 0.0;
    for j in 0..m {
        let y = -rho + (j as f64 + 0.5) * h;
        for i in 0..m {
            let x = -rho + (i as f64 + 0.5) * h;
            if x.hypot(y) >= rho {
                continue;
            }
            let ux = (u(x + d, y) - u(x - d, y)) / (2.0 * d);
            let uy = (u(x, y + d) - u(x, y - d)) / (2.0 * d);
            let g = 1.0 - u(x, y).norm_sqr();
            acc += 0.5 * (ux.norm_sqr() + uy.norm_sqr()) + g * g / (4.0 * eps * eps);
        }
    }
    let got = acc * h * h;
    assert!((got - expect).abs() < 2e-3 * expect, "quadrature {got} vs {expect}");
}

const Q: f64 = 0.043213918263772250;

fn theta1(w: Complex64) -> Complex64 {
    (0..12)
        .map(|n| 2.0 * (-1f64).powi(n) * Q.powf((n as f64 + 0.5).powi(2)) * (w * (2 * n + 1) as f64).sin())
        .sum()
}

#[test]
fn annulus_energy_matches_theta_phase_quadrature() {
    let cfg = VortexConfig::from_triples(&[(0.25, 0.5, 1), (0.75, 0.5, -1)]).unwrap();
    let rho = 0.05;
    let expect = annulus_energy(&cfg, rho).unwrap();

    // grad of sum_i d_i arg theta_1(pi (z - a_i)) by differences of the complex log,
    // which is free of branch cuts
    let centres: Vec<(Complex64, f64)> = cfg
        .points()
        .iter()
        .zip(cfg.degrees())
        .map(|(p, d)| (Complex64::new(p.x1(), p.x2()), *d as f64))
        .collect();
    let dlog = |z: Complex64, dz: Complex64| -> f64 {
        centres
            .iter()
            .map(|(a, d)| d * (theta1(PI * (z + dz - a)) / theta1(PI * (z - dz - a))).arg())
            .sum()
    };
    let m = 2048;
    let h = 1.0 / m as f64;
    let dd = 1e-5;
    let mut grads = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let z = Complex64::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            let gx = dlog(z, Complex64::new(dd, 0.0)) / (2.0 * dd);
            let gy = dlog(z, Complex64::new(0.0, dd)) / (2.0 * dd);
            grads.push((z, gx, gy));
        }
    }
    // curl Phi has zero mean, so the mean of the phase gradient is the constant part to remove
    let n2 = grads.len() as f64;
    let mx = grads.iter().map(|g| g.1).sum::<f64>() / n2;
    let my = grads.iter().map(|g| g.2).sum::<f64>() / n2;
    let mut acc = 0.0;
    for (z, gx, gy) in &grads {
        let near = centres.iter().any(|(a, _)| {
            let dx = (z.re - a.re + 0.5).rem_euclid(1.0) - 0.5;
            let dy = (z.im - a.im + 0.5).rem_euclid(1.0) - 0.5;
            dx.hypot(dy) < rho
        });
        if !near {
            acc += 0.5 * ((gx - mx).powi(2) + (gy - my).powi(2));
        }
    }
    let got = acc * h * h;
    assert!((got - expect).abs() < 3e-3 * expect, "quadrature {got} vs {expect}");

    // and the expansion m pi log(1/rho) + W holds to O(rho)
    let w = renormalized_energy(&build_green(GridSpec::new(128).unwrap(), 1e-3).unwrap(), &cfg).unwrap();
    assert!((expect - 2.0 * PI * (1.0 / rho).ln() - w).abs() < 0.05);
}
