//! Complex fields sampled on the uniform torus grid, with snapshot I/O.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fft::Fft2;
use crate::green::{read_f64, read_u32};
use crate::torus::GridSpec;

const SNAPSHOT_MAGIC: &[u8; 4] = b"GLSU";
const SNAPSHOT_VERSION: u32 = 1;

/// Row-major samples `u(i h, j h)` at index `j n + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl FieldGrid {
    pub fn new(grid: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} samples, grid needs {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(FieldGrid { grid, data })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> Complex64 + Sync) -> Self {
        let n = grid.n();
        let data = (0..grid.len())
            .into_par_iter()
            .map(|k| f(grid.node(k % n, k / n)))
            .collect();
        FieldGrid { grid, data }
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        FieldGrid {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[self.grid.index(i, j)]
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Spectral partial derivatives `(d_1 u, d_2 u)`; the Nyquist mode is dropped.
    pub fn gradient(&self, fft: &Fft2) -> [Vec<Complex64>; 2] {
        let mut hat = self.data.clone();
        fft.forward(&mut hat);
        spectral_gradient(self.grid, &hat, fft)
    }
}

/// Partial derivatives from Fourier coefficients.
pub(crate) fn spectral_gradient(grid: GridSpec, hat: &[Complex64], fft: &Fft2) -> [Vec<Complex64>; 2] {
    let n = grid.n();
    let mut d1 = hat.to_vec();
    let mut d2 = hat.to_vec();
    let factor = |i: usize| -> f64 {
        if i == n / 2 {
            0.0
        } else {
            2.0 * PI * grid.wavenumber(i) as f64
        }
    };
    d1.par_chunks_mut(n)
        .zip(d2.par_chunks_mut(n))
        .enumerate()
        .for_each(|(j, (r1, r2))| {
            let k2 = factor(j);
            for i in 0..n {
                let k1 = factor(i);
                r1[i] *= Complex64::new(0.0, k1);
                r2[i] *= Complex64::new(0.0, k2);
            }
        });
    fft.inverse(&mut d1);
    fft.inverse(&mut d2);
    [d1, d2]
}

/// A field together with the parameters needed to resume or post-process it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: FieldGrid,
    pub epsilon: f64,
    pub time: f64,
}

impl Snapshot {
    /// Layout: magic `GLSU`, version, `n`, `epsilon`, `time`, then interleaved
    /// real and imaginary parts, little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
        w.write_all(&(self.field.grid.n() as u32).to_le_bytes())?;
        w.write_all(&self.epsilon.to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        for z in &self.field.data {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Format("truncated snapshot".into()))?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::Format(format!("bad snapshot magic {magic:?}")));
        }
        let version = read_u32(&mut r)?;
        if version != SNAPSHOT_VERSION {
            return Err(Error::Format(format!("unsupported snapshot version {version}")));
        }
        let grid = GridSpec::new(read_u32(&mut r)? as usize)?;
        let epsilon = read_f64(&mut r)?;
        let time = read_f64(&mut r)?;
        let mut data = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            data.push(Complex64::new(re, im));
        }
        Ok(Snapshot {
            field: FieldGrid { grid, data },
            epsilon,
            time,
        })
    }
}
