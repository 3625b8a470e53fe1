//! Torus Green function `F` solving `Laplace F = 2 pi (delta_0 - 1)` with
//! `F(x) - log|x| -> 0` at the origin, and the renormalized energy built on it.
//!
//! Values and gradients come from a one-dimensional lattice resummation:
//! summing the Fourier series over `k1` in closed form leaves, for a
//! minimal-image displacement `(x, y)`,
//!
//! ```text
//! F(x, y) = pi |y| - pi y^2 + c + sum_n log|1 - exp(2 pi i x - 2 pi |y + n|)|
//! ```
//!
//! with `c = -log(2 pi) - 2 sum_{n>0} log(1 - exp(-2 pi n))`, whose image
//! terms decay like `exp(-2 pi |n|)`. The tabulated smooth part
//! (`F` minus a cut-off logarithm) backs a bicubic fast path and the
//! on-disk cache.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::VortexConfig;
use crate::error::{invalid, Error, Result};
use crate::torus::{min_image_component, curl_of_gradient, min_image_diff, GridSpec, TorusVector};
use crate::util::{halton, radial_cutoff};

const IMAGE_TERMS: i32 = 7;
const CACHE_MAGIC: &[u8; 4] = b"GLSF";
const CACHE_VERSION: u32 = 1;

/// Mean of the normalized `F` over the torus, `pi/6 - log(2 pi) - 2 sum_n log(1 - exp(-2 pi n))`.
pub fn green_mean() -> f64 {
    PI / 6.0 + green_offset()
}

/// Additive constant of the lattice sum that enforces `F(x) - log|x| -> 0`.
fn green_offset() -> f64 {
    let p: f64 = (1..=IMAGE_TERMS).map(|n| (-(-2.0 * PI * n as f64).exp()).ln_1p()).sum();
    -(2.0 * PI).ln() - 2.0 * p
}

// cut-off radii for the logarithm subtracted from the tabulated smooth part
const LOG_CUT_INNER: f64 = 0.2;
const LOG_CUT_OUTER: f64 = 0.4;

/// `exp(a + ib) - 1` without cancellation for small arguments.
#[inline]
fn expm1_complex(a: f64, b: f64) -> Complex64 {
    let half = (0.5 * b).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin())
}

#[inline]
fn sign(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `F` at a minimal-image displacement; `-inf` at the origin. The square
/// lattice is symmetric under both axis reflections, so `F` is evaluated on
/// `(|x|, |y|)`, which makes evenness exact.
pub(crate) fn green_value(x: f64, y: f64) -> f64 {
    let (x, y) = (x.abs(), y.abs());
    let mut s = PI * y.abs() - PI * y * y + green_offset();
    for n in -IMAGE_TERMS..=IMAGE_TERMS {
        let a = -2.0 * PI * (y + n as f64).abs();
        let b = 2.0 * PI * x;
        if n == 0 {
            s += expm1_complex(a, b).norm().ln();
        } else {
            let q = a.exp();
            s += 0.5 * (-2.0 * q * b.cos() + q * q).ln_1p();
        }
    }
    s
}

/// Gradient of `F` at a minimal-image displacement.
pub(crate) fn green_gradient(x: f64, y: f64) -> [f64; 2] {
    let [gx, gy] = green_gradient_quadrant(x.abs(), y.abs());
    [gx * sign(x), gy * sign(y)]
}

fn green_gradient_quadrant(x: f64, y: f64) -> [f64; 2] {
    let sy = sign(y);
    let mut gx = 0.0;
    let mut gy = PI * sy - 2.0 * PI * y;
    for n in -IMAGE_TERMS..=IMAGE_TERMS {
        let t = y + n as f64;
        let st = if n == 0 { sy } else { sign(t) };
        let a = -2.0 * PI * t.abs();
        let b = 2.0 * PI * x;
        // e^w / (1 - e^w)
        let ew = Complex64::new(a.exp() * b.cos(), a.exp() * b.sin());
        let ratio = ew / (-expm1_complex(a, b));
        gx += 2.0 * PI * ratio.im;
        gy += 2.0 * PI * st * ratio.re;
    }
    [gx, gy]
}

/// Smooth remainder `F(x) - chi(|x|) log|x|`, with value 0 at the origin.
fn smooth_part(x: f64, y: f64) -> f64 {
    let r = x.hypot(y);
    if r == 0.0 {
        return 0.0;
    }
    let (chi, _, _) = radial_cutoff(r, LOG_CUT_INNER, LOG_CUT_OUTER);
    if r < 1e-3 {
        // F - log r = log|(1 - e^w) / (2 pi r)| + (pi|y| - pi y^2) + image terms,
        // computed without the cancellation of the two logarithms
        let a = -2.0 * PI * y.abs();
        let b = 2.0 * PI * x;
        let mut s = (expm1_complex(a, b).norm() / (2.0 * PI * r)).ln() + PI * y.abs() - PI * y * y
            + green_offset()
            + (2.0 * PI).ln();
        for n in (-IMAGE_TERMS..=IMAGE_TERMS).filter(|&n| n != 0) {
            let q = (-2.0 * PI * (y + n as f64).abs()).exp();
            s += 0.5 * (-2.0 * q * b.cos() + q * q).ln_1p();
        }
        s
    } else {
        green_value(x, y) - chi * r.ln()
    }
}

#[inline]
fn catmull_rom(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// The normalized torus Green function together with a tabulated smooth part.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenTable {
    grid: GridSpec,
    accuracy: f64,
    c0: f64,
    smooth: Vec<f64>,
}

/// Builds and validates the table on `grid`.
///
/// Fails with a resolution error when the bicubic fast path cannot reach
/// `accuracy` on this grid.
pub fn build_green(grid: GridSpec, accuracy: f64) -> Result<GreenTable> {
    if !(accuracy > 0.0 && accuracy <= 1e-3) {
        return Err(invalid(format!("accuracy {accuracy} outside (0, 1e-3]")));
    }
    let n = grid.n();
    let mut smooth = vec![0.0; grid.len()];
    smooth.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            let d = TorusVector::from_raw(grid.coord(i), grid.coord(j));
            *v = smooth_part(d.v1, d.v2);
        }
    });
    let table = GreenTable {
        grid,
        accuracy,
        // F = F0 - c0 with F0 the zero-mean solution
        c0: -green_mean(),
        smooth,
    };
    let err = table.interpolation_error();
    if err > accuracy {
        return Err(Error::Resolution(format!(
            "n = {n} gives interpolation error {err:.3e} > {accuracy:.1e}"
        )));
    }
    Ok(table)
}

impl GreenTable {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// `c0 = lim_{x -> 0} (F0(x) - log|x|)` for the zero-mean solution `F0`.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn smooth_samples(&self) -> &[f64] {
        &self.smooth
    }

    /// `F(v)`.
    pub fn eval_f(&self, v: TorusVector) -> Result<f64> {
        if v.is_zero() {
            return Err(Error::SingularPoint);
        }
        Ok(green_value(v.v1, v.v2))
    }

    /// Zero-mean variant `F0 = F + c0`.
    pub fn eval_f0(&self, v: TorusVector) -> Result<f64> {
        Ok(self.eval_f(v)? + self.c0)
    }

    /// `grad F(v)`.
    pub fn eval_grad_f(&self, v: TorusVector) -> Result<[f64; 2]> {
        if v.is_zero() {
            return Err(Error::SingularPoint);
        }
        Ok(green_gradient(v.v1, v.v2))
    }

    /// `curl F(v) = (F_x2, -F_x1)`.
    pub fn eval_curl_f(&self, v: TorusVector) -> Result<[f64; 2]> {
        Ok(curl_of_gradient(self.eval_grad_f(v)?))
    }

    /// Bicubic fast path: `chi(|v|) log|v|` plus the interpolated smooth part.
    pub fn eval_f_interpolated(&self, v: TorusVector) -> Result<f64> {
        if v.is_zero() {
            return Err(Error::SingularPoint);
        }
        let n = self.grid.n() as isize;
        let fx = v.v1 * n as f64;
        let fy = v.v2 * n as f64;
        let ix = fx.floor();
        let iy = fy.floor();
        let wx = catmull_rom(fx - ix);
        let wy = catmull_rom(fy - iy);
        let mut acc = 0.0;
        for (b, wyb) in wy.iter().enumerate() {
            let j = (iy as isize + b as isize - 1).rem_euclid(n) as usize;
            let row = &self.smooth[j * n as usize..(j + 1) * n as usize];
            let mut racc = 0.0;
            for (a, wxa) in wx.iter().enumerate() {
                let i = (ix as isize + a as isize - 1).rem_euclid(n) as usize;
                racc += wxa * row[i];
            }
            acc += wyb * racc;
        }
        let r = v.norm();
        let (chi, _, _) = radial_cutoff(r, LOG_CUT_INNER, LOG_CUT_OUTER);
        Ok(acc + chi * r.ln())
    }

    /// Max deviation between the bicubic fast path and the series over a
    /// fixed low-discrepancy probe set, including points within `10 h` of the origin.
    pub fn interpolation_error(&self) -> f64 {
        let h = self.grid.h();
        let mut worst: f64 = 0.0;
        for k in 1..=2000 {
            let v = TorusVector::from_raw(halton(k, 2) - 0.5, halton(k, 3) - 0.5);
            let near = TorusVector::from_raw(
                (halton(k, 5) - 0.5) * 20.0 * h,
                (halton(k, 7) - 0.5) * 20.0 * h,
            );
            for p in [v, near] {
                if p.norm() < 1e-12 {
                    continue;
                }
                let exact = green_value(p.v1, p.v2);
                let approx = self.eval_f_interpolated(p).unwrap_or(f64::NAN);
                worst = worst.max((exact - approx).abs());
            }
        }
        worst
    }

    /// Writes the binary cache: magic `GLSF`, version, `n`, accuracy, `c0`,
    /// then the smooth samples, all little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.grid.n() as u32).to_le_bytes())?;
        w.write_all(&self.accuracy.to_le_bytes())?;
        w.write_all(&self.c0.to_le_bytes())?;
        for v in &self.smooth {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?} in Green cache")));
        }
        let version = read_u32(&mut r)?;
        if version != CACHE_VERSION {
            return Err(Error::Format(format!("unsupported Green cache version {version}")));
        }
        let grid = GridSpec::new(read_u32(&mut r)? as usize)?;
        let accuracy = read_f64(&mut r)?;
        let c0 = read_f64(&mut r)?;
        let mut smooth = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            smooth.push(read_f64(&mut r)?);
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::Format("trailing bytes in Green cache".into()));
        }
        Ok(GreenTable {
            grid,
            accuracy,
            c0,
            smooth,
        })
    }
}

/// Largest deviation of the 5-point Laplacian of `F` from `-2 pi` over nodes at
/// least `exclusion` away from the singularity.
pub fn laplacian_defect(grid: GridSpec, exclusion: f64) -> f64 {
    let n = grid.n();
    let h = grid.h();
    let mut f = vec![0.0; grid.len()];
    f.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = if i == 0 && j == 0 {
                0.0
            } else {
                green_value(min_image_component(grid.coord(i)), min_image_component(grid.coord(j)))
            };
        }
    });
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (min_image_component(grid.coord(i)), min_image_component(grid.coord(j)));
            if x.hypot(y) < exclusion {
                continue;
            }
            let at = |a: usize, b: usize| f[(b % n) * n + a % n];
            let lap = (at(i + 1, j) + at(i + n - 1, j) + at(i, j + 1) + at(i, j + n - 1) - 4.0 * at(i, j)) / (h * h);
            worst = worst.max((lap + 2.0 * PI).abs());
        }
    }
    worst
}

pub(crate) fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(f64::from_le_bytes(b))
}

/// `W(a, d) = -pi sum_{i != j} d_i d_j F(a_i - a_j)`.
pub fn renormalized_energy(table: &GreenTable, cfg: &VortexConfig) -> Result<f64> {
    let pts = cfg.points();
    let deg = cfg.degrees();
    let mut w = 0.0;
    for i in 0..cfg.len() {
        for j in 0..i {
            let f = table
                .eval_f(min_image_diff(pts[i], pts[j]))
                .map_err(|_| coincident(i, j))?;
            w -= 2.0 * PI * (deg[i] * deg[j]) as f64 * f;
        }
    }
    Ok(w)
}

/// `D_{a_i} W = -2 pi sum_{j != i} d_i d_j grad F(a_i - a_j)`.
pub fn grad_w(table: &GreenTable, cfg: &VortexConfig, i: usize) -> Result<[f64; 2]> {
    if i >= cfg.len() {
        return Err(invalid(format!("vortex index {i} out of range")));
    }
    let pts = cfg.points();
    let deg = cfg.degrees();
    let mut g = [0.0; 2];
    for j in (0..cfg.len()).filter(|&j| j != i) {
        let df = table
            .eval_grad_f(min_image_diff(pts[i], pts[j]))
            .map_err(|_| coincident(i, j))?;
        let c = -2.0 * PI * (deg[i] * deg[j]) as f64;
        g[0] += c * df[0];
        g[1] += c * df[1];
    }
    Ok(g)
}

fn coincident(i: usize, j: usize) -> Error {
    Error::SingularConfiguration(format!("vortices {i} and {j} coincide"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::wrap;
    use approx::assert_abs_diff_eq;

    fn table() -> GreenTable {
        build_green(GridSpec::new(256).unwrap(), 1e-4).unwrap()
    }

    #[test]
    fn normalization_at_the_origin() {
        let t = table();
        for s in [1e-3, 1e-5, 1e-7] {
            for (c, d) in [(1.0, 0.0), (0.0, 1.0), (0.6, -0.8)] {
                let f = t.eval_f(TorusVector::from_raw(c * s, d * s)).unwrap();
                assert!((f - f64::ln(s)).abs() < 1e-4 * s.sqrt(), "s = {s}");
            }
        }
    }

    #[test]
    fn evenness_is_exact() {
        let t = table();
        for k in 1..200 {
            let v = TorusVector::from_raw(halton(k, 2) - 0.5, halton(k, 3) - 0.5);
            assert_eq!(t.eval_f(v).unwrap(), t.eval_f(-v).unwrap());
            let c = t.eval_curl_f(v).unwrap();
            let cm = t.eval_curl_f(-v).unwrap();
            assert_abs_diff_eq!(c[0], -cm[0], epsilon = 1e-12);
            assert_abs_diff_eq!(c[1], -cm[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_point_is_rejected() {
        let t = table();
        let z = TorusVector::from_raw(0.0, 0.0);
        assert!(matches!(t.eval_f(z), Err(Error::SingularPoint)));
        assert!(matches!(t.eval_grad_f(z), Err(Error::SingularPoint)));
        assert!(matches!(t.eval_curl_f(z), Err(Error::SingularPoint)));
    }

    #[test]
    fn near_field_gradient_is_logarithmic() {
        let t = table();
        let v = TorusVector::from_raw(6e-4, -8e-4);
        let g = t.eval_grad_f(v).unwrap();
        let r2 = 1e-6;
        let expect = [v.v1 / r2, v.v2 / r2];
        let rel = ((g[0] - expect[0]).hypot(g[1] - expect[1])) / expect[0].hypot(expect[1]);
        assert!(rel < 0.01, "rel = {rel}");
    }

    #[test]
    fn curl_is_orthogonal_to_gradient() {
        let t = table();
        let v = TorusVector::from_raw(0.31, -0.12);
        let g = t.eval_grad_f(v).unwrap();
        let c = t.eval_curl_f(v).unwrap();
        assert_eq!(g[0] * c[0] + g[1] * c[1], 0.0);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let t = table();
        let step = 1e-5;
        for k in 1..100 {
            let (x, y) = (halton(k, 2) - 0.5, halton(k, 3) - 0.5);
            if x.hypot(y) < 0.02 {
                continue;
            }
            let g = green_gradient(x, y);
            let fx = (green_value(x + step, y) - green_value(x - step, y)) / (2.0 * step);
            let fy = (green_value(x, y + step) - green_value(x, y - step)) / (2.0 * step);
            assert!((g[0] - fx).abs() < 1e-6 * (1.0 + g[0].abs()), "{x} {y}");
            assert!((g[1] - fy).abs() < 1e-6 * (1.0 + g[1].abs()), "{x} {y}");
        }
        let _ = t;
    }

    #[test]
    fn periodic_across_the_seam() {
        // the minimal-image representation must join smoothly at |x_i| = 1/2
        for y in [-0.3, 0.0, 0.2] {
            let a = green_value(0.5 - 1e-9, y);
            let b = green_value(-0.5 + 1e-9, y);
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
            let a = green_value(y, 0.5 - 1e-9);
            let b = green_value(y, -0.5 + 1e-9);
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn cache_round_trip_and_bad_magic() {
        let t = build_green(GridSpec::new(64).unwrap(), 1e-3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.glsf");
        t.save(&path).unwrap();
        let back = GreenTable::load(&path).unwrap();
        assert_eq!(back, t);
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(GreenTable::load(&path), Err(Error::Format(_))));
    }

    #[test]
    fn coarse_grid_is_refused() {
        let r = build_green(GridSpec::new(16).unwrap(), 1e-6);
        assert!(matches!(r, Err(Error::Resolution(_))));
        assert!(build_green(GridSpec::new(64).unwrap(), 0.1).is_err());
    }

    #[test]
    fn dipole_and_empty_energies() {
        let t = table();
        let cfg = VortexConfig::from_triples(&[(0.2, 0.3, 1), (0.55, 0.4, -1)]).unwrap();
        let f = t
            .eval_f(min_image_diff(cfg.points()[0], cfg.points()[1]))
            .unwrap();
        assert_abs_diff_eq!(
            renormalized_energy(&t, &cfg).unwrap(),
            2.0 * PI * f,
            epsilon = 1e-12
        );
        assert_eq!(renormalized_energy(&t, &VortexConfig::empty()).unwrap(), 0.0);
    }

    #[test]
    fn constant_shift_scales_energy_by_pi_c_m() {
        // shifting F by c adds -pi c sum_{i!=j} d_i d_j = pi c m for unit degrees
        let t = table();
        let cfg = VortexConfig::from_triples(&[
            (0.1, 0.2, 1),
            (0.4, 0.7, -1),
            (0.8, 0.1, 1),
            (0.6, 0.5, -1),
        ])
        .unwrap();
        let c = 0.37;
        let mut shifted = 0.0;
        let mut plain = 0.0;
        let (p, d) = (cfg.points(), cfg.degrees());
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let f = t.eval_f(min_image_diff(p[i], p[j])).unwrap();
                    plain -= PI * (d[i] * d[j]) as f64 * f;
                    shifted -= PI * (d[i] * d[j]) as f64 * (f + c);
                }
            }
        }
        assert_abs_diff_eq!(plain, renormalized_energy(&t, &cfg).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(shifted - plain, PI * c * 4.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_is_translation_invariant() {
        let t = table();
        let cfg = VortexConfig::from_triples(&[
            (0.1, 0.2, 1),
            (0.4, 0.7, -1),
            (0.8, 0.1, 1),
            (0.6, 0.5, -1),
        ])
        .unwrap();
        let w = renormalized_energy(&t, &cfg).unwrap();
        let moved = cfg.translate([0.377, -0.913]);
        assert!((renormalized_energy(&t, &moved).unwrap() - w).abs() < 1e-10);
    }

    #[test]
    fn mirror_symmetric_dipole_gradient() {
        // dipole symmetric about x = 1/2: gradients mirror with flipped x component
        let t = table();
        let cfg = VortexConfig::from_triples(&[(0.3, 0.4, 1), (0.7, 0.4, -1)]).unwrap();
        let g0 = grad_w(&t, &cfg, 0).unwrap();
        let g1 = grad_w(&t, &cfg, 1).unwrap();
        assert_abs_diff_eq!(g0[0], -g1[0], epsilon = 1e-12);
        assert_abs_diff_eq!(g0[1], g1[1], epsilon = 1e-12);
        assert_abs_diff_eq!(g0[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coincident_points_are_singular() {
        let t = table();
        let p = wrap(0.2, 0.2).unwrap();
        let q = wrap(0.7, 0.2).unwrap();
        // bypass validation through a with_general_degrees round trip on distinct points
        let cfg = VortexConfig::with_general_degrees(vec![p, q], vec![1, -1]).unwrap();
        assert!(grad_w(&t, &cfg, 5).is_err());
    }
}
