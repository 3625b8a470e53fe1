//! On-disk layout of a harness output directory and the CSV/JSON codecs.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::config::VortexConfig;
use crate::diagnostics::{TrackEvent, VortexTrack};
use crate::error::{Error, Result};
use crate::ode::OdeTrajectory;
use crate::solver::ConservedRecord;
use crate::torus::wrap;

#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn green_cache(&self) -> PathBuf {
        self.root.join("green.glsf")
    }

    pub fn run_dir(&self, k: usize) -> PathBuf {
        self.root.join(format!("eps_{k}"))
    }

    pub fn conserved_csv(&self, k: usize) -> PathBuf {
        self.run_dir(k).join("conserved.csv")
    }

    pub fn track_csv(&self, k: usize) -> PathBuf {
        self.run_dir(k).join("track.csv")
    }

    pub fn track_events(&self, k: usize) -> PathBuf {
        self.run_dir(k).join("track_events.json")
    }

    pub fn run_summary(&self, k: usize) -> PathBuf {
        self.run_dir(k).join("summary.json")
    }

    pub fn snapshot(&self, k: usize, frame: usize) -> PathBuf {
        self.run_dir(k).join(format!("snap_{frame:05}.glsu"))
    }

    pub fn ode_csv(&self) -> PathBuf {
        self.root.join("ode.csv")
    }

    pub fn ode_summary(&self) -> PathBuf {
        self.root.join("ode_summary.json")
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report.json")
    }

    pub fn overlay_svg(&self) -> PathBuf {
        self.root.join("trajectories.svg")
    }

    pub fn error_svg(&self) -> PathBuf {
        self.root.join("error_vs_epsilon.svg")
    }

    pub fn audit_json(&self) -> PathBuf {
        self.root.join("audit.json")
    }

    pub fn audit_csv(&self) -> PathBuf {
        self.root.join("audit.csv")
    }
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingArtifact(path.to_path_buf()))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    require(path)?;
    Ok(serde_json::from_reader(File::open(path)?)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ConservedRow {
    t: f64,
    energy: f64,
    mass: f64,
    momentum_x: f64,
    momentum_y: f64,
}

pub fn write_conserved(path: &Path, log: &[ConservedRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in log {
        w.serialize(ConservedRow {
            t: r.t,
            energy: r.energy,
            mass: r.mass,
            momentum_x: r.momentum[0],
            momentum_y: r.momentum[1],
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_conserved(path: &Path) -> Result<Vec<ConservedRecord>> {
    require(path)?;
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize::<ConservedRow>()
        .map(|row| {
            let row = row?;
            Ok(ConservedRecord {
                t: row.t,
                energy: row.energy,
                mass: row.mass,
                momentum: [row.momentum_x, row.momentum_y],
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct TrackRow {
    t: f64,
    label: usize,
    degree: i32,
    x: f64,
    y: f64,
    frame_matching_cost: f64,
}

/// One row per (frame, label); events go to a JSON sidecar.
pub fn write_track(csv_path: &Path, events_path: &Path, track: &VortexTrack) -> Result<()> {
    let mut w = csv::Writer::from_path(csv_path)?;
    for (f, t) in track.times.iter().enumerate() {
        for (label, p) in track.positions[f].iter().enumerate() {
            w.serialize(TrackRow {
                t: *t,
                label,
                degree: track.degrees[label],
                x: p.x1(),
                y: p.x2(),
                frame_matching_cost: track.frame_costs[f],
            })?;
        }
    }
    w.flush()?;
    write_json(events_path, &track.events)
}

/// Frames of a stored track with vortices ordered by label.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredTrack {
    pub frames: Vec<(f64, VortexConfig)>,
    pub events: Vec<TrackEvent>,
}

pub fn read_track(csv_path: &Path, events_path: &Path) -> Result<StoredTrack> {
    require(csv_path)?;
    let mut r = csv::Reader::from_path(csv_path)?;
    let mut frames: Vec<(f64, Vec<(usize, f64, f64, i32)>)> = Vec::new();
    for row in r.deserialize::<TrackRow>() {
        let row = row?;
        match frames.last_mut() {
            Some((t, v)) if *t == row.t => v.push((row.label, row.x, row.y, row.degree)),
            _ => frames.push((row.t, vec![(row.label, row.x, row.y, row.degree)])),
        }
    }
    let frames = frames
        .into_iter()
        .map(|(t, mut v)| {
            v.sort_by_key(|e| e.0);
            let triples: Vec<_> = v.iter().map(|e| (e.1, e.2, e.3)).collect();
            Ok((t, VortexConfig::from_triples(&triples)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StoredTrack {
        frames,
        events: read_json(events_path)?,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct OdeRow {
    t: f64,
    label: usize,
    degree: i32,
    x: f64,
    y: f64,
    lift_x: f64,
    lift_y: f64,
    #[serde(rename = "W")]
    w: f64,
    impulse_x: f64,
    impulse_y: f64,
}

pub fn write_ode(path: &Path, traj: &OdeTrajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for f in &traj.frames {
        for (label, a) in f.lifted.iter().enumerate() {
            let p = wrap(a[0], a[1])?;
            w.serialize(OdeRow {
                t: f.t,
                label,
                degree: traj.degrees[label],
                x: p.x1(),
                y: p.x2(),
                lift_x: a[0],
                lift_y: a[1],
                w: f.w,
                impulse_x: f.impulse[0],
                impulse_y: f.impulse[1],
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// ODE frames as `(t, lifted positions, degrees)`.
pub fn read_ode(path: &Path) -> Result<Vec<(f64, Vec<[f64; 2]>, Vec<i32>)>> {
    require(path)?;
    let mut r = csv::Reader::from_path(path)?;
    let mut out: Vec<(f64, Vec<[f64; 2]>, Vec<i32>)> = Vec::new();
    for row in r.deserialize::<OdeRow>() {
        let row = row?;
        match out.last_mut() {
            Some((t, a, d)) if *t == row.t => {
                a.push([row.lift_x, row.lift_y]);
                d.push(row.degree);
            }
            _ => out.push((row.t, vec![[row.lift_x, row.lift_y]], vec![row.degree])),
        }
    }
    Ok(out)
}

pub fn lifted_config(lifted: &[[f64; 2]], degrees: &[i32]) -> Result<VortexConfig> {
    let pts = lifted.iter().map(|a| wrap(a[0], a[1])).collect::<Result<Vec<_>>>()?;
    VortexConfig::with_general_degrees(pts, degrees.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::track;

    #[test]
    fn track_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = VortexConfig::from_triples(&[(0.2, 0.3, 1), (0.7, 0.6, -1)]).unwrap();
        let b = a.translate([0.01, -0.02]);
        let tr = track(&[(0.0, a.clone()), (0.1, b.clone())], 0.01).unwrap();
        let (c, e) = (dir.path().join("t.csv"), dir.path().join("e.json"));
        write_track(&c, &e, &tr).unwrap();
        let back = read_track(&c, &e).unwrap();
        assert_eq!(back.frames, vec![(0.0, a), (0.1, b)]);
        assert!(back.events.is_empty());
    }

    #[test]
    fn missing_artifacts_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let l = Layout::new(dir.path());
        assert!(matches!(read_ode(&l.ode_csv()), Err(Error::MissingArtifact(_))));
    }
}
