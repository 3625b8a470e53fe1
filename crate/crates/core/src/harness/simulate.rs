use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::artifacts::{self, Layout};
use super::config::ExperimentConfig;
use crate::config::VortexConfig;
use crate::diagnostics::{detect_vortices, track, DetectOptions, TrackEvent};
use crate::error::Result;
use crate::harmonic::make_initial_data;
use crate::profile::CoreProfile;
use crate::solver::SolverState;

pub const MASS_DRIFT_TOL: f64 = 1e-10;
pub const MOMENTUM_DRIFT_TOL: f64 = 1e-8;
pub const ENERGY_DRIFT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub index: usize,
    pub epsilon: f64,
    pub grid_n: usize,
    pub dt: f64,
    pub steps: u64,
    pub gauge: f64,
    /// Constant current of the phase map used for the initial data.
    pub background_current: [f64; 2],
    pub initial_mean_current: [f64; 2],
    pub initial_energy: f64,
    pub mass_drift_relative: f64,
    pub momentum_drift: f64,
    pub energy_drift_relative: f64,
    pub frames_tracked: usize,
    pub degrees_conserved: bool,
    pub events: Vec<TrackEvent>,
    pub detection_failure: Option<String>,
    pub middle_frame: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutcome {
    pub runs: Vec<RunSummary>,
    pub passed: bool,
}

/// Runs every member of the epsilon sweep, concurrently on the current rayon pool.
pub fn run_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<SimulateOutcome> {
    std::fs::create_dir_all(out)?;
    let layout = Layout::new(out);
    let profile = CoreProfile::new(cfg.profile.into())?;
    let runs = (0..cfg.epsilons.len())
        .into_par_iter()
        .map(|k| simulate_one(cfg, &layout, k, &profile))
        .collect::<Result<Vec<_>>>()?;
    let passed = runs.iter().all(|r| r.passed);
    Ok(SimulateOutcome { runs, passed })
}

pub fn simulate_one(
    cfg: &ExperimentConfig,
    layout: &Layout,
    k: usize,
    profile: &CoreProfile,
) -> Result<RunSummary> {
    let eps = cfg.epsilons[k];
    let grid = cfg.grid_for(k)?;
    let vortices = cfg.vortex_config()?;
    std::fs::create_dir_all(layout.run_dir(k))?;

    let init = make_initial_data(&vortices, eps, grid, profile)?;
    let gauge = cfg.gauge();
    let mut field = init.field;
    let phase = Complex64::from_polar(1.0, gauge);
    field.data_mut().iter_mut().for_each(|z| *z *= phase);

    let mut state = SolverState::new(field, eps, 0.0, cfg.dt_for(k)?)?;
    let opts = DetectOptions::for_epsilon(eps);
    let middle = cfg.middle_frame();
    let last = cfg.frame_count() - 1;
    let mut frames: Vec<(f64, VortexConfig)> = Vec::new();
    let mut detection_failure = None;
    let mut frame = 0usize;
    log::info!("epsilon = {eps}: n = {}, dt = {:.3e}", grid.n(), state.dt());
    state.evolve(cfg.t_final, cfg.snapshot_every, |s| {
        if cfg.outputs.save_snapshots || frame == 0 || frame == middle || frame == last {
            s.snapshot().save(&layout.snapshot(k, frame))?;
        }
        if detection_failure.is_none() {
            match detect_vortices(&s.field(), &opts) {
                Ok(d) => frames.push((s.time(), d.config)),
                Err(e) => {
                    log::warn!("epsilon = {eps}: detection stopped at t = {}: {e}", s.time());
                    detection_failure = Some(e.to_string());
                }
            }
        }
        log::debug!("epsilon = {eps}: frame {frame} at t = {:.5}", s.time());
        frame += 1;
        Ok(())
    })?;

    let tr = track(&frames, eps)?;
    artifacts::write_track(&layout.track_csv(k), &layout.track_events(k), &tr)?;
    artifacts::write_conserved(&layout.conserved_csv(k), state.conserved_log())?;

    let log = state.conserved_log();
    let (first, rest) = (log[0], &log[1..]);
    let mass_drift_relative = rest.iter().map(|r| (r.mass - first.mass).abs()).fold(0.0, f64::max) / first.mass;
    let momentum_drift = rest
        .iter()
        .map(|r| (r.momentum[0] - first.momentum[0]).hypot(r.momentum[1] - first.momentum[1]))
        .fold(0.0, f64::max);
    let energy_drift_relative =
        rest.iter().map(|r| (r.energy - first.energy).abs()).fold(0.0, f64::max) / first.energy.abs().max(1.0);

    let degrees_conserved = detection_failure.is_none()
        && !tr.events.iter().any(|e| matches!(e, TrackEvent::DegreeChange { .. }))
        && {
            let mut a = tr.degrees.clone();
            let mut b = vortices.degrees().to_vec();
            a.sort_unstable();
            b.sort_unstable();
            a == b
        };
    let passed = mass_drift_relative <= MASS_DRIFT_TOL
        && momentum_drift <= MOMENTUM_DRIFT_TOL
        && energy_drift_relative <= ENERGY_DRIFT_TOL
        && degrees_conserved;
    let summary = RunSummary {
        index: k,
        epsilon: eps,
        grid_n: grid.n(),
        dt: state.dt(),
        steps: state.step_count(),
        gauge,
        background_current: init.background,
        initial_mean_current: init.mean_current,
        initial_energy: first.energy,
        mass_drift_relative,
        momentum_drift,
        energy_drift_relative,
        frames_tracked: tr.len(),
        degrees_conserved,
        events: tr.events.clone(),
        detection_failure,
        middle_frame: middle,
        passed,
    };
    artifacts::write_json(&layout.run_summary(k), &summary)?;
    Ok(summary)
}
