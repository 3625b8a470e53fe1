//! Vortex detection from plaquette winding numbers.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::VortexConfig;
use crate::error::{Error, Result};
use crate::field::FieldGrid;
use crate::torus::{geodesic_dist, wrap, GridSpec};

/// How a sub-cell position is assigned to a detected core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locator {
    /// Zero of the bilinear interpolant on the winding cell.
    #[default]
    BilinearZero,
    /// Centroid of `|Ju|` over the 5x5 plaquette neighbourhood.
    JacobianCentroid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    pub max_degree: i32,
    /// Require `|u|` below `core_modulus` somewhere on each claimed core.
    pub check_core_modulus: bool,
    pub core_modulus: f64,
    /// Core size, used for the near-collision warning.
    pub epsilon: Option<f64>,
    pub locator: Locator,
    /// Plaquettes within this many cells are merged into one cluster.
    pub cluster_cells: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            max_degree: 1,
            check_core_modulus: true,
            core_modulus: 0.5,
            epsilon: None,
            locator: Locator::BilinearZero,
            cluster_cells: 4,
        }
    }
}

impl DetectOptions {
    pub fn for_epsilon(epsilon: f64) -> Self {
        DetectOptions {
            epsilon: Some(epsilon),
            ..Self::default()
        }
    }

    /// Options for unit-modulus maps, which have no small-modulus cores.
    pub fn for_unit_maps(max_degree: i32) -> Self {
        DetectOptions {
            max_degree,
            check_core_modulus: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub config: VortexConfig,
    /// Number of nonzero-winding plaquettes in each reported cluster.
    pub cluster_sizes: Vec<usize>,
    /// Clusters whose windings cancelled and were dropped.
    pub dropped_neutral: usize,
    pub warnings: Vec<String>,
}

#[inline]
pub(crate) fn wrap_angle(d: f64) -> f64 {
    // into (-pi, pi]
    let w = d - 2.0 * PI * (d / (2.0 * PI)).round();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Wrapped phase differences along the `x1` and `x2` edges leaving each node.
/// Each edge is wrapped once, so the plaquette windings sum to zero exactly.
pub(crate) fn edge_differences(field: &FieldGrid) -> [Vec<f64>; 2] {
    let n = field.grid().n();
    let phase: Vec<f64> = field.data().par_iter().map(|z| z.arg()).collect();
    let ex = (0..phase.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            wrap_angle(phase[j * n + (i + 1) % n] - phase[k])
        })
        .collect();
    let ey = (0..phase.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            wrap_angle(phase[((j + 1) % n) * n + i] - phase[k])
        })
        .collect();
    [ex, ey]
}

/// Winding number of every plaquette, indexed like the lower-left node.
pub fn plaquette_windings(field: &FieldGrid) -> Vec<i32> {
    let n = field.grid().n();
    let [ex, ey] = edge_differences(field);
    (0..ex.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let right = j * n + (i + 1) % n;
            let up = ((j + 1) % n) * n + i;
            let s = ex[k] + ey[right] - ex[up] - ey[k];
            (s / (2.0 * PI)).round() as i32
        })
        .collect()
}

fn cell_distance(a: (usize, usize), b: (usize, usize), n: usize) -> usize {
    let d = |x: usize, y: usize| {
        let t = x.abs_diff(y);
        t.min(n - t)
    };
    d(a.0, b.0).max(d(a.1, b.1))
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

const MAX_DEFECT_PLAQUETTES: usize = 20_000;

/// Finds vortices as clusters of nonzero-winding plaquettes.
pub fn detect_vortices(field: &FieldGrid, opts: &DetectOptions) -> Result<Detection> {
    let grid = field.grid();
    let n = grid.n();
    let windings = plaquette_windings(field);
    let defects: Vec<(usize, usize, i32)> = windings
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0)
        .map(|(k, w)| (k % n, k / n, *w))
        .collect();
    if defects.len() > MAX_DEFECT_PLAQUETTES {
        return Err(Error::SpuriousDetection(format!(
            "{} plaquettes carry winding; the field is not vortex-like",
            defects.len()
        )));
    }
    let mut parent: Vec<usize> = (0..defects.len()).collect();
    for a in 0..defects.len() {
        for b in 0..a {
            let (pa, pb) = ((defects[a].0, defects[a].1), (defects[b].0, defects[b].1));
            if cell_distance(pa, pb, n) <= opts.cluster_cells {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = std::collections::BTreeMap::new();
    for a in 0..defects.len() {
        let r = find(&mut parent, a);
        let slot = *root_slot.entry(r).or_insert_with(|| {
            clusters.push(Vec::new());
            clusters.len() - 1
        });
        clusters[slot].push(a);
    }

    let mut points = Vec::new();
    let mut degrees = Vec::new();
    let mut sizes = Vec::new();
    let mut dropped = 0;
    for members in &clusters {
        let degree: i32 = members.iter().map(|&a| defects[a].2).sum();
        if degree == 0 {
            dropped += 1;
            continue;
        }
        if degree.abs() > opts.max_degree {
            return Err(Error::SpuriousDetection(format!(
                "cluster of degree {degree} exceeds the maximum {}",
                opts.max_degree
            )));
        }
        // representative: a plaquette of the cluster's sign with the smallest corner modulus
        let rep = members
            .iter()
            .copied()
            .filter(|&a| defects[a].2.signum() == degree.signum())
            .min_by(|&a, &b| {
                let ma = corner_min(field, defects[a].0, defects[a].1);
                let mb = corner_min(field, defects[b].0, defects[b].1);
                ma.total_cmp(&mb)
            })
            .expect("cluster has a plaquette of its own sign");
        let (ci, cj) = (defects[rep].0, defects[rep].1);
        if opts.check_core_modulus {
            let m = members
                .iter()
                .map(|&a| corner_min(field, defects[a].0, defects[a].1))
                .fold(f64::INFINITY, f64::min);
            if m > opts.core_modulus {
                return Err(Error::SpuriousDetection(format!(
                    "winding cell ({ci}, {cj}) has min |u| = {m:.3}, not a core"
                )));
            }
        }
        let pos = match (opts.locator, degree.abs()) {
            (Locator::BilinearZero, 1) => {
                bilinear_zero(field, ci, cj).unwrap_or_else(|| jacobian_centroid(field, ci, cj))
            }
            _ => jacobian_centroid(field, ci, cj),
        };
        points.push(wrap(pos[0], pos[1])?);
        degrees.push(degree);
        sizes.push(members.len());
    }

    let mut warnings = Vec::new();
    if let Some(eps) = opts.epsilon {
        for a in 0..points.len() {
            for b in 0..a {
                let d = geodesic_dist(points[a], points[b]);
                if d < 4.0 * eps {
                    let msg = format!("near collision: cores {b} and {a} are {d:.4} apart (< 4 epsilon)");
                    log::warn!("{msg}");
                    warnings.push(msg);
                }
            }
        }
    }
    let config = VortexConfig::with_general_degrees(points, degrees)?;
    Ok(Detection {
        config,
        cluster_sizes: sizes,
        dropped_neutral: dropped,
        warnings,
    })
}

fn corners(field: &FieldGrid, i: usize, j: usize) -> [Complex64; 4] {
    let n = field.grid().n();
    let (i1, j1) = ((i + 1) % n, (j + 1) % n);
    [field.at(i, j), field.at(i1, j), field.at(i, j1), field.at(i1, j1)]
}

fn corner_min(field: &FieldGrid, i: usize, j: usize) -> f64 {
    corners(field, i, j).iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

/// Newton iteration for the zero of the bilinear interpolant on cell `(i, j)`.
fn bilinear_zero(field: &FieldGrid, i: usize, j: usize) -> Option<[f64; 2]> {
    let [u00, u10, u01, u11] = corners(field, i, j);
    let (mut s, mut t) = (0.5, 0.5);
    for _ in 0..50 {
        let u = u00 * (1.0 - s) * (1.0 - t) + u10 * s * (1.0 - t) + u01 * (1.0 - s) * t + u11 * s * t;
        let us = (u10 - u00) * (1.0 - t) + (u11 - u01) * t;
        let ut = (u01 - u00) * (1.0 - s) + (u11 - u10) * s;
        let det = us.re * ut.im - us.im * ut.re;
        if det.abs() < 1e-300 {
            return None;
        }
        let ds = (u.re * ut.im - u.im * ut.re) / det;
        let dt = (us.re * u.im - us.im * u.re) / det;
        s -= ds;
        t -= dt;
        if !(s.is_finite() && t.is_finite()) || s.abs() > 3.0 || t.abs() > 3.0 {
            return None;
        }
        if ds.abs().max(dt.abs()) < 1e-14 {
            break;
        }
    }
    if !(-0.5..=1.5).contains(&s) || !(-0.5..=1.5).contains(&t) {
        return None;
    }
    let h = field.grid().h();
    Some([(i as f64 + s) * h, (j as f64 + t) * h])
}

/// Centroid of `|Ju|` over the 5x5 plaquettes centred on `(i, j)`.
fn jacobian_centroid(field: &FieldGrid, i: usize, j: usize) -> [f64; 2] {
    let grid: GridSpec = field.grid();
    let n = grid.n() as isize;
    let h = grid.h();
    let (mut wsum, mut xs, mut ys) = (0.0, 0.0, 0.0);
    for dj in -2isize..=2 {
        for di in -2isize..=2 {
            let ii = (i as isize + di).rem_euclid(n) as usize;
            let jj = (j as isize + dj).rem_euclid(n) as usize;
            let [u00, u10, u01, u11] = corners(field, ii, jj);
            let ux = ((u10 - u00) + (u11 - u01)) / (2.0 * h);
            let uy = ((u01 - u00) + (u11 - u10)) / (2.0 * h);
            let w = (ux.conj() * uy).im.abs();
            wsum += w;
            xs += w * di as f64;
            ys += w * dj as f64;
        }
    }
    let (ox, oy) = if wsum > 0.0 { (xs / wsum, ys / wsum) } else { (0.0, 0.0) };
    [(i as f64 + 0.5 + ox) * h, (j as f64 + 0.5 + oy) * h]
}
