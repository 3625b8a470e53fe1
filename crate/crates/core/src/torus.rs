//! Geometry of the flat unit torus `R^2 / Z^2` and the uniform spectral grid.
//!
//! Fourier convention used throughout the crate: modes `exp(2 pi i k.x)` with
//! integer wavenumbers `k`, so the Laplacian symbol is `-4 pi^2 |k|^2`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The rotation `J` with `J_12 = 1`, `J_21 = -1`. Multiplication by `i`
/// on `C = R^2` is `-J`.
pub const ROTATION: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

/// Applies `J` to a vector: `(v2, -v1)`.
#[inline]
pub fn rotate(v: [f64; 2]) -> [f64; 2] {
    [v[1], -v[0]]
}

/// `u x v = u1 v2 - u2 v1`.
#[inline]
pub fn cross(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// `curl` of a scalar from its gradient: `(phi_x2, -phi_x1)`, i.e. `J grad`.
#[inline]
pub fn curl_of_gradient(grad: [f64; 2]) -> [f64; 2] {
    rotate(grad)
}

#[inline]
pub fn dot(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

#[inline]
pub fn norm(u: [f64; 2]) -> f64 {
    u[0].hypot(u[1])
}

/// Reduces a coordinate into `[0, 1)`.
#[inline]
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduces a displacement component into `[-1/2, 1/2)`; half-period ties go to `-1/2`.
#[inline]
pub fn min_image_component(d: f64) -> f64 {
    let r = d - (d + 0.5).floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// A point of the unit torus with both coordinates in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    x1: f64,
    x2: f64,
}

impl TorusPoint {
    /// Same as [`wrap`].
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        wrap(x1, x2)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn coords(&self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    /// Translates by a raw displacement and wraps back onto the torus.
    pub fn translate(&self, v: [f64; 2]) -> Self {
        TorusPoint {
            x1: wrap_unit(self.x1 + v[0]),
            x2: wrap_unit(self.x2 + v[1]),
        }
    }
}

/// Reduces raw coordinates mod 1.
pub fn wrap(x1: f64, x2: f64) -> Result<TorusPoint> {
    if !x1.is_finite() || !x2.is_finite() {
        return Err(invalid(format!("non-finite coordinates ({x1}, {x2})")));
    }
    Ok(TorusPoint {
        x1: wrap_unit(x1),
        x2: wrap_unit(x2),
    })
}

/// A minimal-image displacement, each component in `[-1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusVector {
    pub v1: f64,
    pub v2: f64,
}

impl TorusVector {
    /// Builds the minimal image of an arbitrary displacement.
    pub fn from_raw(d1: f64, d2: f64) -> Self {
        TorusVector {
            v1: min_image_component(d1),
            v2: min_image_component(d2),
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.v1, self.v2]
    }

    pub fn norm(&self) -> f64 {
        self.v1.hypot(self.v2)
    }

    pub fn is_zero(&self) -> bool {
        self.v1 == 0.0 && self.v2 == 0.0
    }
}

impl std::ops::Neg for TorusVector {
    type Output = TorusVector;
    fn neg(self) -> TorusVector {
        TorusVector::from_raw(-self.v1, -self.v2)
    }
}

/// `p - q` reduced to the minimal image.
pub fn min_image_diff(p: TorusPoint, q: TorusPoint) -> TorusVector {
    TorusVector::from_raw(p.x1 - q.x1, p.x2 - q.x2)
}

/// Geodesic distance on the flat torus; bounded by `sqrt(2)/2`.
pub fn geodesic_dist(p: TorusPoint, q: TorusPoint) -> f64 {
    min_image_diff(p, q).norm()
}

/// Uniform `n x n` grid on the unit torus.
///
/// Samples are stored row-major: index `j * n + i` holds the node
/// `(i h, j h)`, so `x1` runs fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(invalid(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        Ok(GridSpec { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(i), self.coord(j)]
    }

    /// Signed wavenumber of FFT bin `i`, in `{-n/2, ..., n/2 - 1}`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Smallest admissible grid resolving cores of size `epsilon` with
    /// `h <= epsilon / 4`, never below 128.
    pub fn default_for_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(invalid("epsilon must be positive"));
        }
        let needed = (4.0 / epsilon).ceil() as usize;
        GridSpec::new(needed.max(128).next_power_of_two())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn wrap_examples() {
        let p = wrap(1.25, -0.5).unwrap();
        assert_abs_diff_eq!(p.x1(), 0.25);
        assert_abs_diff_eq!(p.x2(), 0.5);
        assert_eq!(wrap(0.0, 0.0).unwrap().coords(), [0.0, 0.0]);
        let p = wrap(0.999999, 2.0).unwrap();
        assert_abs_diff_eq!(p.x1(), 0.999999);
        assert_eq!(p.x2(), 0.0);
        assert!(wrap(f64::NAN, 0.0).is_err());
        assert!(wrap(0.0, f64::INFINITY).is_err());
        // tiny negative values must not wrap to exactly 1.0
        assert!(wrap(-1e-18, 0.0).unwrap().x1() < 1.0);
    }

    #[test]
    fn min_image_examples() {
        let d = min_image_diff(wrap(0.9, 0.1).unwrap(), wrap(0.1, 0.1).unwrap());
        assert_abs_diff_eq!(d.v1, -0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(d.v2, 0.0);
        let p = wrap(0.3, 0.7).unwrap();
        assert!(min_image_diff(p, p).is_zero());
        let d = min_image_diff(wrap(0.0, 0.0).unwrap(), wrap(0.5, 0.5).unwrap());
        assert_eq!(d.as_array(), [-0.5, -0.5]);
        let d = min_image_diff(wrap(0.5, 0.5).unwrap(), wrap(0.0, 0.0).unwrap());
        assert_eq!(d.as_array(), [-0.5, -0.5]);
    }

    #[test]
    fn geodesic_examples() {
        let d = geodesic_dist(wrap(0.9, 0.0).unwrap(), wrap(0.1, 0.0).unwrap());
        assert_abs_diff_eq!(d, 0.2, epsilon = 1e-15);
        let p = wrap(0.4, 0.3).unwrap();
        assert_eq!(geodesic_dist(p, p), 0.0);
        let d = geodesic_dist(wrap(0.0, 0.0).unwrap(), wrap(0.5, 0.5).unwrap());
        assert_abs_diff_eq!(d, 2f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rotation_squares_to_minus_identity() {
        let v = [0.3, -1.7];
        assert_eq!(rotate(rotate(v)), [-v[0], -v[1]]);
        assert_eq!(ROTATION[0][1], -ROTATION[1][0]);
        assert_eq!(dot(rotate(v), v), 0.0);
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(8).is_err());
        assert!(GridSpec::new(100).is_err());
        let g = GridSpec::new(64).unwrap();
        assert_eq!(g.h() * g.n() as f64, 1.0);
        assert_eq!(g.wavenumber(31), 31);
        assert_eq!(g.wavenumber(32), -32);
        assert_eq!(g.wavenumber(63), -1);
        assert_eq!(GridSpec::default_for_epsilon(0.05).unwrap().n(), 128);
        assert_eq!(GridSpec::default_for_epsilon(0.01).unwrap().n(), 512);
    }

    fn point() -> impl Strategy<Value = TorusPoint> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| wrap(a, b).unwrap())
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let p = wrap(a, b).unwrap();
            prop_assert!((0.0..1.0).contains(&p.x1()) && (0.0..1.0).contains(&p.x2()));
            prop_assert_eq!(wrap(p.x1(), p.x2()).unwrap(), p);
        }

        #[test]
        fn geodesic_is_a_metric(p in point(), q in point(), r in point()) {
            let pq = geodesic_dist(p, q);
            prop_assert_eq!(pq, geodesic_dist(q, p));
            prop_assert!(pq <= 2f64.sqrt() / 2.0 + 1e-15);
            prop_assert!(pq <= geodesic_dist(p, r) + geodesic_dist(r, q) + 1e-14);
        }

        #[test]
        fn min_image_is_antisymmetric_off_ties(p in point(), q in point()) {
            let d = min_image_diff(p, q);
            prop_assume!(d.v1.abs() < 0.5 && d.v2.abs() < 0.5);
            let e = min_image_diff(q, p);
            prop_assert!((d.v1 + e.v1).abs() < 1e-15 && (d.v2 + e.v2).abs() < 1e-15);
        }
    }
}
