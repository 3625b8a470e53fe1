use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::VortexConfig;
use crate::error::{Error, Result};
use crate::profile::ProfileKind;
use crate::solver::{default_grid, stable_dt};
use crate::torus::GridSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexSpec {
    pub x: f64,
    pub y: f64,
    pub d: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileChoice {
    /// Numerically computed radial minimizer.
    #[default]
    Minimizer,
    Tanh,
}

impl From<ProfileChoice> for ProfileKind {
    fn from(p: ProfileChoice) -> Self {
        match p {
            ProfileChoice::Minimizer => ProfileKind::Numerical,
            ProfileChoice::Tanh => ProfileKind::Tanh,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    /// Keep every snapshot, not just the initial, middle and final ones.
    pub save_snapshots: bool,
    /// Reuse (or create) the Green table cache here instead of `<out>/green.glsf`.
    pub green_cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenSettings {
    pub n: usize,
    pub accuracy: f64,
}

impl Default for GreenSettings {
    fn default() -> Self {
        GreenSettings { n: 256, accuracy: 1e-3 }
    }
}

fn default_dt_factor() -> f64 {
    0.1
}

fn default_ode_tol() -> f64 {
    1e-10
}

/// One experiment: a vortex configuration swept over a decreasing list of core sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub vortices: Vec<VortexSpec>,
    pub epsilons: Vec<f64>,
    /// Per-epsilon grid sizes; the resolution policy picks them when absent.
    #[serde(default)]
    pub grid_n: Option<Vec<usize>>,
    /// `dt = dt_factor * epsilon^2`, capped at the split-step stability limit.
    #[serde(default = "default_dt_factor")]
    pub dt_factor: f64,
    pub t_final: f64,
    pub snapshot_every: f64,
    #[serde(default)]
    pub profile: ProfileChoice,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub green: GreenSettings,
    #[serde(default = "default_ode_tol")]
    pub ode_tol: f64,
}

impl ExperimentConfig {
    /// The default headline experiment: a dipole at maximal separation.
    pub fn headline() -> Self {
        ExperimentConfig {
            version: SCHEMA_VERSION,
            vortices: vec![
                VortexSpec { x: 0.25, y: 0.5, d: 1 },
                VortexSpec { x: 0.75, y: 0.5, d: -1 },
            ],
            epsilons: vec![0.1, 0.1 / 2f64.sqrt(), 0.05],
            grid_n: Some(vec![128, 256, 256]),
            dt_factor: default_dt_factor(),
            t_final: 0.05,
            snapshot_every: 0.0025,
            profile: ProfileChoice::Minimizer,
            outputs: Outputs::default(),
            seed: 0,
            green: GreenSettings::default(),
            ode_tol: default_ode_tol(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.version != SCHEMA_VERSION {
            return bad(format!("unsupported schema version {}", self.version));
        }
        if self.vortices.iter().map(|v| v.d).sum::<i32>() != 0 {
            return bad("vortex degrees must sum to zero".into());
        }
        self.vortex_config().map_err(|e| Error::Config(e.to_string()))?;
        if self.epsilons.is_empty() {
            return bad("at least one epsilon is required".into());
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad("epsilons must lie in (0, 1)".into());
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad("epsilons must be strictly decreasing".into());
        }
        if let Some(g) = &self.grid_n {
            if g.len() != self.epsilons.len() {
                return bad("grid_n must have one entry per epsilon".into());
            }
            for &n in g {
                GridSpec::new(n).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        if !(self.dt_factor > 0.0) {
            return bad("dt_factor must be positive".into());
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad("t_final must be positive".into());
        }
        if !(self.snapshot_every > 0.0 && self.snapshot_every <= self.t_final) {
            return bad("snapshot_every must lie in (0, t_final]".into());
        }
        if !(self.ode_tol > 0.0) {
            return bad("ode_tol must be positive".into());
        }
        if !(self.green.accuracy > 0.0 && self.green.accuracy <= 1e-3) {
            return bad("green.accuracy must lie in (0, 1e-3]".into());
        }
        GridSpec::new(self.green.n).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn vortex_config(&self) -> Result<VortexConfig> {
        let t: Vec<_> = self.vortices.iter().map(|v| (v.x, v.y, v.d)).collect();
        VortexConfig::from_triples(&t)
    }

    pub fn grid_for(&self, k: usize) -> Result<GridSpec> {
        match &self.grid_n {
            Some(g) => GridSpec::new(g[k]),
            None => default_grid(self.epsilons[k]),
        }
    }

    pub fn dt_for(&self, k: usize) -> Result<f64> {
        let eps = self.epsilons[k];
        Ok((self.dt_factor * eps * eps).min(stable_dt(self.grid_for(k)?, true)))
    }

    /// Global phase applied to the initial data, drawn from `seed`.
    pub fn gauge(&self) -> f64 {
        ChaCha8Rng::seed_from_u64(self.seed).gen_range(0.0..std::f64::consts::TAU)
    }

    /// Frames in a run, counting the initial one.
    pub fn frame_count(&self) -> usize {
        (self.t_final / self.snapshot_every).round().max(1.0) as usize + 1
    }

    /// Index of the frame closest to `t_final / 2`.
    pub fn middle_frame(&self) -> usize {
        (self.frame_count() - 1) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headline_round_trips() {
        let c = ExperimentConfig::headline();
        c.validate().unwrap();
        let back = ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.frame_count(), 21);
        assert_eq!(c.middle_frame(), 10);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_sweeps() {
        let mut v: serde_json::Value = serde_json::from_str(&ExperimentConfig::headline().to_json().unwrap()).unwrap();
        v["epsilon"] = serde_json::json!(0.1);
        assert!(matches!(ExperimentConfig::from_json(&v.to_string()), Err(Error::Config(_))));

        let mut c = ExperimentConfig::headline();
        c.epsilons = vec![0.05, 0.1, 0.2];
        c.grid_n = None;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::headline();
        c.vortices[1].d = 1;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::headline();
        c.t_final = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn minimal_json_uses_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"version":1,"vortices":[],"epsilons":[0.1],"t_final":0.01,"snapshot_every":0.005}"#,
        )
        .unwrap();
        assert_eq!(c.dt_factor, 0.1);
        assert_eq!(c.profile, ProfileChoice::Minimizer);
        assert!(c.dt_for(0).unwrap() <= 0.1 * 0.01);
        assert_eq!(c.gauge(), ExperimentConfig { seed: 0, ..c.clone() }.gauge());
    }
}
