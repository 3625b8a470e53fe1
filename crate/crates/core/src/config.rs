use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::torus::{geodesic_dist, wrap, TorusPoint};

/// Points closer than this are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// Vortex positions `a_i` on the torus with nonzero integer degrees `d_i`
/// summing to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexConfig {
    points: Vec<TorusPoint>,
    degrees: Vec<i32>,
}

impl VortexConfig {
    /// Unit degrees only (`d_i = +-1`).
    pub fn new(points: Vec<TorusPoint>, degrees: Vec<i32>) -> Result<Self> {
        if let Some(d) = degrees.iter().find(|d| d.abs() != 1) {
            return Err(invalid(format!(
                "degree {d} is not +-1; use VortexConfig::with_general_degrees"
            )));
        }
        Self::with_general_degrees(points, degrees)
    }

    /// Arbitrary nonzero integer degrees.
    pub fn with_general_degrees(points: Vec<TorusPoint>, degrees: Vec<i32>) -> Result<Self> {
        if points.len() != degrees.len() {
            return Err(invalid("points and degrees differ in length"));
        }
        if degrees.contains(&0) {
            return Err(invalid("zero degree"));
        }
        if degrees.iter().sum::<i32>() != 0 {
            return Err(invalid("degrees must sum to zero"));
        }
        for i in 0..points.len() {
            for j in 0..i {
                if geodesic_dist(points[i], points[j]) < COINCIDENCE_TOL {
                    return Err(Error::SingularConfiguration(format!(
                        "vortices {j} and {i} coincide"
                    )));
                }
            }
        }
        Ok(VortexConfig { points, degrees })
    }

    /// Convenience constructor from raw `(x, y, d)` triples.
    pub fn from_triples(triples: &[(f64, f64, i32)]) -> Result<Self> {
        let points = triples
            .iter()
            .map(|&(x, y, _)| wrap(x, y))
            .collect::<Result<Vec<_>>>()?;
        let degrees = triples.iter().map(|t| t.2).collect();
        Self::with_general_degrees(points, degrees)
    }

    pub fn empty() -> Self {
        VortexConfig {
            points: Vec::new(),
            degrees: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn has_unit_degrees(&self) -> bool {
        self.degrees.iter().all(|d| d.abs() == 1)
    }

    /// Smallest pairwise geodesic distance (infinite for fewer than two vortices).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in 0..i {
                best = best.min(geodesic_dist(self.points[i], self.points[j]));
            }
        }
        best
    }

    /// `r = min_{i != j} |a_i - a_j| / 4`.
    pub fn separation_radius(&self) -> f64 {
        0.25 * self.min_separation()
    }

    /// `sum_i d_i a_i` with each `a_i` taken in `[0, 1)^2`.
    pub fn dipole_moment(&self) -> [f64; 2] {
        let mut m = [0.0; 2];
        for (p, &d) in self.points.iter().zip(&self.degrees) {
            m[0] += d as f64 * p.x1();
            m[1] += d as f64 * p.x2();
        }
        m
    }

    /// True when a single-valued unit map with current exactly `-curl Phi`
    /// exists, i.e. the dipole moment is a lattice vector.
    pub fn is_lattice_consistent(&self, tol: f64) -> bool {
        let m = self.dipole_moment();
        (m[0] - m[0].round()).abs() <= tol && (m[1] - m[1].round()).abs() <= tol
    }

    pub fn translate(&self, v: [f64; 2]) -> Self {
        VortexConfig {
            points: self.points.iter().map(|p| p.translate(v)).collect(),
            degrees: self.degrees.clone(),
        }
    }

    /// Returns a copy with vortex `i` displaced by `v`.
    pub fn with_moved(&self, i: usize, v: [f64; 2]) -> Result<Self> {
        let mut points = self.points.clone();
        points[i] = points[i].translate(v);
        Self::with_general_degrees(points, self.degrees.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(VortexConfig::from_triples(&[(0.1, 0.1, 1), (0.2, 0.2, 1)]).is_err());
        assert!(VortexConfig::from_triples(&[(0.1, 0.1, 1), (1.1, 0.1, -1)]).is_err());
        assert!(VortexConfig::from_triples(&[(0.1, 0.1, 2), (0.4, 0.1, -2)]).is_ok());
        let pts = vec![wrap(0.1, 0.1).unwrap(), wrap(0.4, 0.1).unwrap()];
        assert!(VortexConfig::new(pts, vec![2, -2]).is_err());
        assert!(VortexConfig::empty().is_lattice_consistent(0.0));
    }

    #[test]
    fn dipoles_are_never_lattice_consistent() {
        let dipole = VortexConfig::from_triples(&[(0.25, 0.5, 1), (0.75, 0.5, -1)]).unwrap();
        assert!(!dipole.is_lattice_consistent(1e-12));
        let square = VortexConfig::from_triples(&[
            (0.25, 0.25, 1),
            (0.25, 0.75, -1),
            (0.75, 0.25, 1),
            (0.75, 0.75, -1),
        ])
        .unwrap();
        assert!(square.is_lattice_consistent(1e-12));
        assert!((square.separation_radius() - 0.125).abs() < 1e-15);
    }
}
