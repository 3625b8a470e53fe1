use std::path::Path;

use serde::{Deserialize, Serialize};

use super::artifacts::{self, lifted_config, Layout, StoredTrack};
use super::audit::{audit, AuditReport};
use super::config::ExperimentConfig;
use super::load_or_build_green;
use super::simulate::RunSummary;
use super::svg::{error_vs_epsilon, trajectory_overlay, Series};
use crate::config::VortexConfig;
use crate::diagnostics::{current_j, match_configs, match_distance, TrackEvent};
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::field::Snapshot;
use crate::harmonic::CanonicalMap;
use crate::torus::{geodesic_dist, TorusPoint};

/// Radius of the balls removed around the vortices for the current comparison.
pub const CURRENT_EXCLUSION: f64 = 0.1;
/// At the smallest epsilon the sup path error must be below this fraction of the
/// initial minimum separation.
pub const FINAL_ERROR_FRACTION: f64 = 0.1;
const TIME_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonComparison {
    pub epsilon: f64,
    pub grid_n: usize,
    /// `(t, match_distance(PDE, ODE))` at each tracked frame.
    pub errors: Vec<(f64, f64)>,
    pub initial_error: f64,
    pub sup_error: f64,
    /// `|| j(u)/|u| - j(H(a(t))) ||_{L^2}` away from the vortices, at `current_time`.
    pub current_error: f64,
    pub current_time: f64,
    pub degrees_conserved: bool,
    pub rotation_sense_ok: bool,
    pub events: Vec<TrackEvent>,
    pub mass_drift_relative: f64,
    pub momentum_drift: f64,
    pub energy_drift_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub initial_separation: f64,
    pub runs: Vec<EpsilonComparison>,
    pub audit: AuditReport,
    pub criteria: Vec<Criterion>,
    pub passed: bool,
}

/// Per-label displacement from the first to the last frame.
fn displacements(frames: &[&VortexConfig]) -> Vec<[f64; 2]> {
    let (Some(a), Some(b)) = (frames.first(), frames.last()) else {
        return Vec::new();
    };
    a.points()
        .iter()
        .zip(b.points())
        .map(|(p, q)| crate::min_image_diff(*q, *p).as_array())
        .collect()
}

/// Sums per-step minimal-image displacements, so paths longer than half a period are handled.
fn path_displacements(frames: &[VortexConfig]) -> Vec<[f64; 2]> {
    let mut total = vec![[0.0; 2]; frames.first().map_or(0, |f| f.len())];
    for w in frames.windows(2) {
        for (acc, d) in total.iter_mut().zip(displacements(&[&w[0], &w[1]])) {
            acc[0] += d[0];
            acc[1] += d[1];
        }
    }
    total
}

fn compare_one(
    layout: &Layout,
    k: usize,
    ode: &[(f64, Vec<[f64; 2]>, Vec<i32>)],
) -> Result<EpsilonComparison> {
    let summary: RunSummary = artifacts::read_json(&layout.run_summary(k))?;
    let stored: StoredTrack = artifacts::read_track(&layout.track_csv(k), &layout.track_events(k))?;
    let ode_at = |t: f64| -> Result<VortexConfig> {
        let f = ode
            .iter()
            .find(|f| (f.0 - t).abs() < TIME_MATCH_TOL)
            .ok_or_else(|| Error::Format(format!("no ODE frame at t = {t}")))?;
        lifted_config(&f.1, &f.2)
    };

    let mut errors = Vec::new();
    let mut pde_frames = Vec::new();
    let mut ode_frames = Vec::new();
    for (t, pde) in &stored.frames {
        let Ok(reference) = ode_at(*t) else { break };
        let e = match match_distance(pde, &reference) {
            Ok(d) => d,
            Err(Error::IncomparableConfigs(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        errors.push((*t, e));
        pde_frames.push(pde.clone());
        ode_frames.push(reference);
    }
    let initial_error = errors.first().map_or(f64::INFINITY, |e| e.1);
    let sup_error = errors.iter().map(|e| e.1).fold(if errors.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);

    // the sense of motion must agree for every vortex the ODE moves appreciably
    let grid_h = 1.0 / summary.grid_n as f64;
    let rotation_sense_ok = match (pde_frames.first(), ode_frames.first()) {
        (Some(p0), Some(o0)) if pde_frames.iter().all(|f| f.degrees() == p0.degrees()) => {
            let labels = match_configs(o0, p0)?.pairs;
            let pd = path_displacements(&pde_frames);
            let od = path_displacements(&ode_frames);
            od.iter().zip(&labels).all(|(o, &l)| {
                let p = pd[l];
                o[0].hypot(o[1]) < grid_h.max(1e-3) || p[0] * o[0] + p[1] * o[1] > 0.0
            })
        }
        _ => false,
    };

    let snap = Snapshot::load(&layout.snapshot(k, summary.middle_frame))?;
    let reference = ode_at(snap.time)?;
    let map = CanonicalMap::lattice_minimal(&reference, 0.0)?;
    let grid = snap.field.grid();
    let [j1, j2] = current_j(&snap.field, &Fft2::new(grid));
    let n = grid.n();
    let mut acc = 0.0;
    for (idx, z) in snap.field.data().iter().enumerate() {
        let x = grid.node(idx % n, idx / n);
        let p = TorusPoint::new(x[0], x[1])?;
        if reference.points().iter().any(|a| geodesic_dist(p, *a) < CURRENT_EXCLUSION) {
            continue;
        }
        let r = z.norm().max(1e-300);
        let h = map.current(x)?;
        acc += (j1[idx] / r - h[0]).powi(2) + (j2[idx] / r - h[1]).powi(2);
    }
    let current_error = (acc * grid.h() * grid.h()).sqrt();

    Ok(EpsilonComparison {
        epsilon: summary.epsilon,
        grid_n: summary.grid_n,
        errors,
        initial_error,
        sup_error,
        current_error,
        current_time: snap.time,
        degrees_conserved: summary.degrees_conserved,
        rotation_sense_ok,
        events: stored.events,
        mass_drift_relative: summary.mass_drift_relative,
        momentum_drift: summary.momentum_drift,
        energy_drift_relative: summary.energy_drift_relative,
    })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Compares the PDE tracks of a finished `simulate` run with the `ode` trajectory.
pub fn run_compare(cfg: &ExperimentConfig, out: &Path) -> Result<ComparisonReport> {
    let layout = Layout::new(out);
    let ode = artifacts::read_ode(&layout.ode_csv())?;
    let runs = (0..cfg.epsilons.len())
        .map(|k| compare_one(&layout, k, &ode))
        .collect::<Result<Vec<_>>>()?;
    let table = load_or_build_green(cfg, &layout)?;
    let audit = audit(cfg, &table)?;
    let initial = cfg.vortex_config()?;
    let separation = initial.min_separation();

    let sups: Vec<f64> = runs.iter().map(|r| r.sup_error).collect();
    let currents: Vec<f64> = runs.iter().map(|r| r.current_error).collect();
    let last_sup = *sups.last().unwrap_or(&f64::INFINITY);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ");
    let mut criteria = vec![
        Criterion {
            name: "path_error_decreasing".into(),
            passed: strictly_decreasing(&sups),
            detail: format!("sup match distance per epsilon: [{}]", fmt(&sups)),
        },
        Criterion {
            name: "path_error_small".into(),
            passed: last_sup < FINAL_ERROR_FRACTION * separation,
            detail: format!("{last_sup:.4e} vs {:.4e}", FINAL_ERROR_FRACTION * separation),
        },
        Criterion {
            name: "degrees_conserved".into(),
            passed: runs.iter().all(|r| r.degrees_conserved),
            detail: String::new(),
        },
        Criterion {
            name: "rotation_sense".into(),
            passed: runs.iter().all(|r| r.rotation_sense_ok),
            detail: String::new(),
        },
        Criterion {
            name: "current_error_decreasing".into(),
            passed: strictly_decreasing(&currents),
            detail: format!("current error per epsilon: [{}]", fmt(&currents)),
        },
        Criterion {
            name: "energy_excess_sane".into(),
            passed: audit.passed,
            detail: format!(
                "gamma2 >= -slack: {}, minimizer below tanh: {}",
                audit.gamma2_nonnegative, audit.minimizer_below_tanh
            ),
        },
    ];
    // a non-finite sup means tracking broke down, which is a failure in its own right
    if sups.iter().any(|s| !s.is_finite()) {
        criteria.push(Criterion {
            name: "tracks_complete".into(),
            passed: false,
            detail: "a PDE track could not be matched to the ODE".into(),
        });
    }
    let passed = criteria.iter().all(|c| c.passed);
    let report = ComparisonReport {
        initial_separation: separation,
        runs,
        audit,
        criteria,
        passed,
    };

    artifacts::write_json(&layout.report(), &report)?;
    let mut series = Vec::new();
    for (k, r) in report.runs.iter().enumerate() {
        let stored = artifacts::read_track(&layout.track_csv(k), &layout.track_events(k))?;
        series.push(Series {
            name: format!("PDE eps = {:.4}", r.epsilon),
            paths: label_paths(stored.frames.iter().map(|f| &f.1)),
            dashed: false,
        });
    }
    let ode_cfgs = ode.iter().map(|f| lifted_config(&f.1, &f.2)).collect::<Result<Vec<_>>>()?;
    series.push(Series {
        name: "point vortices".into(),
        paths: label_paths(ode_cfgs.iter()),
        dashed: true,
    });
    std::fs::write(layout.overlay_svg(), trajectory_overlay(&series))?;
    let pts: Vec<(f64, f64)> = report.runs.iter().map(|r| (r.epsilon, r.sup_error)).collect();
    std::fs::write(layout.error_svg(), error_vs_epsilon(&pts, "sup path error vs epsilon"))?;
    Ok(report)
}

fn label_paths<'a>(frames: impl Iterator<Item = &'a VortexConfig>) -> Vec<Vec<[f64; 2]>> {
    let mut paths: Vec<Vec<[f64; 2]>> = Vec::new();
    for f in frames {
        if paths.is_empty() {
            paths = vec![Vec::new(); f.len()];
        }
        if f.len() != paths.len() {
            break;
        }
        for (p, q) in paths.iter_mut().zip(f.points()) {
            p.push(q.coords());
        }
    }
    paths
}
