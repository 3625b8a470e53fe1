//! Numerical checks of the weak Jacobian evolution law and of the integral
//! identity linking the canonical current to the point-vortex velocity.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::VortexConfig;
use crate::diagnostics::current::{jacobian_pairing, Jet, TestFunction};
use crate::error::{invalid, Result};
use crate::fft::Fft2;
use crate::field::{FieldGrid, Snapshot};
use crate::green::green_gradient;
use crate::torus::{curl_of_gradient, geodesic_dist, min_image_diff, GridSpec, TorusPoint};

/// `sum_{j,k,l} eta_{jl} J_{jk} a_k . b_l` for the rotation `J = [[0, 1], [-1, 0]]`,
/// with `a . b` the real inner product: `(eta_11 - eta_22) u1.u2 + eta_12 (|u2|^2 - |u1|^2)`.
#[inline]
fn rotated_hessian_form(h: [[f64; 2]; 2], u1u2: f64, u1sq: f64, u2sq: f64) -> f64 {
    (h[0][0] - h[1][1]) * u1u2 + h[0][1] * (u2sq - u1sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    /// Centred difference of `int eta Ju` across the outer snapshots.
    pub lhs: f64,
    /// `int eta_{jl} J_{jk} u_{x_k} . u_{x_l}` at the middle snapshot.
    pub rhs: f64,
    pub mismatch: f64,
}

/// Right-hand side of the weak Jacobian law for one field.
pub fn jacobian_rate_rhs(field: &FieldGrid, fft: &Fft2, eta: &TestFunction) -> f64 {
    let grid = field.grid();
    let [d1, d2] = field.gradient(fft);
    let jets = eta.sample(grid);
    let acc: f64 = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (a, b) = (d1[k], d2[k]);
            rotated_hessian_form(jets[k].hess, (a.conj() * b).re, a.norm_sqr(), b.norm_sqr())
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    acc * grid.h() * grid.h()
}

/// Compares `d/dt int eta Ju` (weak form, centred in time) with the
/// right-hand side of the evolution law at the middle of three equally
/// spaced snapshots.
pub fn weak_jacobian_rate_check(snaps: [&Snapshot; 3], eta: &TestFunction) -> Result<RateCheck> {
    let grid = snaps[1].field.grid();
    if snaps.iter().any(|s| s.field.grid() != grid) {
        return Err(invalid("snapshots differ in grid"));
    }
    let (d0, d1) = (snaps[1].time - snaps[0].time, snaps[2].time - snaps[1].time);
    if !(d0 > 0.0) || (d0 - d1).abs() > 1e-9 * d0 {
        return Err(invalid("snapshots must be increasing and equally spaced"));
    }
    let fft = Fft2::new(grid);
    let p0 = jacobian_pairing(&snaps[0].field, &fft, eta);
    let p2 = jacobian_pairing(&snaps[2].field, &fft, eta);
    let lhs = (p2 - p0) / (d0 + d1);
    let rhs = jacobian_rate_rhs(&snaps[1].field, &fft, eta);
    Ok(RateCheck {
        lhs,
        rhs,
        mismatch: (lhs - rhs).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityGap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// `int eta_{jl} J_{jk} j^k j^l` for `j = -curl Phi`, against
/// `d_i D eta(a_i) . (2 pi sum_{j != i} d_j curl F(a_i - a_j))`.
///
/// `eta` must be affine on `B_rho(a_i)` and vanish near every other vortex.
/// The left side is a grid quadrature with `n` points per direction over
/// the support of `eta`, excising `B_rho(a_i)`.
pub fn lemma1_identity_check(
    cfg: &VortexConfig,
    i: usize,
    eta: &TestFunction,
    rho: f64,
    n: usize,
) -> Result<IdentityGap> {
    if i >= cfg.len() {
        return Err(invalid(format!("vortex index {i} out of range")));
    }
    let ai = cfg.points()[i];
    let affine_ok = eta
        .affine_near()
        .iter()
        .any(|(c, r)| geodesic_dist(*c, ai) + rho <= *r + 1e-12);
    if !affine_ok {
        return Err(invalid(format!("eta is not declared affine on B_rho(a_{i})")));
    }
    let Some((centre, radius)) = eta.support() else {
        return Err(invalid("eta needs a bounded support disc"));
    };
    for (j, a) in cfg.points().iter().enumerate() {
        if j != i && geodesic_dist(*a, centre) <= radius {
            return Err(invalid(format!("eta does not vanish near vortex {j}")));
        }
    }
    let grid = GridSpec::new(n)?;
    let h = grid.h();
    let deg = cfg.degrees();
    let current = |p: TorusPoint| -> [f64; 2] {
        let mut j = [0.0; 2];
        for (a, &d) in cfg.points().iter().zip(deg) {
            let v = min_image_diff(p, *a);
            let c = curl_of_gradient(green_gradient(v.v1, v.v2));
            j[0] -= d as f64 * c[0];
            j[1] -= d as f64 * c[1];
        }
        j
    };
    // nodes in the bounding box of the support, as offsets from the node nearest its centre
    let ci = (centre.x1() / h).round() as isize;
    let cj = (centre.x2() / h).round() as isize;
    let span = (radius / h).ceil() as isize + 1;
    let lhs: f64 = (-span..=span)
        .into_par_iter()
        .map(|dj| {
            let mut acc = 0.0;
            for di in -span..=span {
                let x = ((ci + di) as f64 * h, (cj + dj) as f64 * h);
                let p = crate::torus::wrap(x.0, x.1).expect("finite node");
                if geodesic_dist(p, ai) < rho {
                    continue;
                }
                let Jet { hess, .. } = eta.eval([p.x1(), p.x2()]);
                if hess == [[0.0; 2]; 2] {
                    continue;
                }
                let j = current(p);
                acc += rotated_hessian_form(hess, j[0] * j[1], j[0] * j[0], j[1] * j[1]);
            }
            acc
        })
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        * h
        * h;
    let grad_eta = eta.eval([ai.x1(), ai.x2()]).grad;
    let mut v = [0.0; 2];
    for (j, (a, &d)) in cfg.points().iter().zip(deg).enumerate() {
        if j != i {
            let s = min_image_diff(ai, *a);
            let c = curl_of_gradient(green_gradient(s.v1, s.v2));
            v[0] += 2.0 * PI * d as f64 * c[0];
            v[1] += 2.0 * PI * d as f64 * c[1];
        }
    }
    let rhs = deg[i] as f64 * (grad_eta[0] * v[0] + grad_eta[1] * v[1]);
    Ok(IdentityGap {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn constant_eta_gives_zero_rate() {
        let grid = GridSpec::new(32).unwrap();
        let u = FieldGrid::from_fn(grid, |[x, y]| Complex64::new((2.0 * PI * x).cos(), (2.0 * PI * y).sin()));
        let snap = |t: f64| Snapshot {
            field: u.clone(),
            epsilon: 0.1,
            time: t,
        };
        let (a, b, c) = (snap(0.0), snap(0.1), snap(0.2));
        let r = weak_jacobian_rate_check([&a, &b, &c], &TestFunction::constant(2.0)).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn identity_holds_for_a_dipole() {
        let cfg = VortexConfig::from_triples(&[(0.3, 0.45, 1), (0.7, 0.55, -1)]).unwrap();
        let a = cfg.points()[0];
        let eta = TestFunction::localized_affine(a, [0.0, 1.0], 0.05);
        let g = lemma1_identity_check(&cfg, 0, &eta, 0.05, 512).unwrap();
        assert!(g.gap < 0.02 * g.rhs.abs(), "{g:?}");
        assert!(lemma1_identity_check(&cfg, 0, &TestFunction::constant(1.0), 0.05, 64).is_err());
        let wide = TestFunction::localized_affine(a, [0.0, 1.0], 0.25);
        assert!(lemma1_identity_check(&cfg, 0, &wide, 0.25, 64).is_err());
    }
}
