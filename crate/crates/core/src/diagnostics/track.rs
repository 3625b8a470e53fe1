//! Identity-resolved vortex paths from a sequence of detected configurations.

use serde::{Deserialize, Serialize};

use crate::config::VortexConfig;
use crate::diagnostics::detect::{detect_vortices, DetectOptions};
use crate::diagnostics::matching::match_configs;
use crate::error::{invalid, Error, Result};
use crate::field::Snapshot;
use crate::torus::{geodesic_dist, TorusPoint};

/// Two assignments whose costs differ by less than this are indistinguishable.
pub const AMBIGUITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrackEvent {
    /// Two cores came closer than `4 epsilon`; tracking stops here.
    Collision { time: f64, labels: [usize; 2], separation: f64 },
    /// The degree content changed between frames; tracking stops here.
    DegreeChange { time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VortexTrack {
    pub times: Vec<f64>,
    pub degrees: Vec<i32>,
    /// `positions[frame][label]`.
    pub positions: Vec<Vec<TorusPoint>>,
    /// Matching cost against the previous frame (0 for the first).
    pub frame_costs: Vec<f64>,
    /// Labels whose step exceeded the matching radius, per frame.
    pub unmatched: Vec<usize>,
    pub events: Vec<TrackEvent>,
}

impl VortexTrack {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn config_at(&self, frame: usize) -> Result<VortexConfig> {
        VortexConfig::with_general_degrees(self.positions[frame].clone(), self.degrees.clone())
    }

    /// Largest per-frame displacement over the frame spacing.
    pub fn lipschitz_estimate(&self) -> f64 {
        let mut l: f64 = 0.0;
        for f in 1..self.len() {
            let dt = (self.times[f] - self.times[f - 1]).abs();
            for (p, q) in self.positions[f].iter().zip(&self.positions[f - 1]) {
                l = l.max(geodesic_dist(*p, *q) / dt);
            }
        }
        l
    }

    pub fn collided(&self) -> bool {
        self.events.iter().any(|e| matches!(e, TrackEvent::Collision { .. }))
    }
}

/// Labels vortices frame to frame by minimal matching within each degree class.
pub fn track(frames: &[(f64, VortexConfig)], epsilon: f64) -> Result<VortexTrack> {
    let Some((t0, first)) = frames.first() else {
        return Err(invalid("no frames to track"));
    };
    let mut tr = VortexTrack {
        times: vec![*t0],
        degrees: first.degrees().to_vec(),
        positions: vec![first.points().to_vec()],
        frame_costs: vec![0.0],
        unmatched: vec![0],
        events: Vec::new(),
    };
    if let Some(ev) = collision(*t0, first.points(), epsilon) {
        tr.events.push(ev);
        return Ok(tr);
    }
    for (f, (t, cfg)) in frames.iter().enumerate().skip(1) {
        let prev = tr.config_at(tr.len() - 1)?;
        let m = match match_configs(&prev, cfg) {
            Ok(m) => m,
            Err(Error::IncomparableConfigs(msg)) => {
                log::warn!("tracking stopped at t = {t}: {msg}");
                tr.events.push(TrackEvent::DegreeChange { time: *t });
                break;
            }
            Err(e) => return Err(e),
        };
        if m.margin < AMBIGUITY_TOL {
            return Err(Error::AmbiguousMatching { frame: f });
        }
        let radius = 0.5 * prev.min_separation();
        let next: Vec<TorusPoint> = m.pairs.iter().map(|&k| cfg.points()[k]).collect();
        let unmatched = next
            .iter()
            .zip(prev.points())
            .filter(|(p, q)| geodesic_dist(**p, **q) > radius)
            .count();
        if unmatched > 0 {
            log::warn!("{unmatched} vortices moved farther than the matching radius at t = {t}");
        }
        tr.times.push(*t);
        tr.positions.push(next);
        tr.frame_costs.push(m.cost);
        tr.unmatched.push(unmatched);
        if let Some(ev) = collision(*t, &tr.positions[tr.len() - 1], epsilon) {
            tr.events.push(ev);
            break;
        }
    }
    Ok(tr)
}

fn collision(t: f64, pts: &[TorusPoint], epsilon: f64) -> Option<TrackEvent> {
    for a in 0..pts.len() {
        for b in 0..a {
            let d = geodesic_dist(pts[a], pts[b]);
            if d < 4.0 * epsilon {
                return Some(TrackEvent::Collision {
                    time: t,
                    labels: [b, a],
                    separation: d,
                });
            }
        }
    }
    None
}

/// Detects vortices in every snapshot, then tracks them.
pub fn track_snapshots(snaps: &[Snapshot], opts: &DetectOptions) -> Result<VortexTrack> {
    let eps = snaps.first().map(|s| s.epsilon).ok_or_else(|| invalid("no snapshots"))?;
    let frames = snaps
        .iter()
        .map(|s| Ok((s.time, detect_vortices(&s.field, opts)?.config)))
        .collect::<Result<Vec<_>>>()?;
    track(&frames, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_frames_give_constant_paths() {
        let cfg = VortexConfig::from_triples(&[(0.2, 0.3, 1), (0.7, 0.6, -1)]).unwrap();
        let frames: Vec<_> = (0..10).map(|k| (k as f64 * 0.1, cfg.clone())).collect();
        let tr = track(&frames, 0.01).unwrap();
        assert_eq!(tr.len(), 10);
        assert!(tr.positions.iter().all(|p| p == cfg.points()));
        assert_eq!(tr.lipschitz_estimate(), 0.0);
    }

    #[test]
    fn relabels_shuffled_frames() {
        let a = VortexConfig::from_triples(&[(0.2, 0.3, 1), (0.7, 0.6, 1), (0.4, 0.8, -1), (0.9, 0.1, -1)]).unwrap();
        let b = VortexConfig::from_triples(&[(0.91, 0.1, -1), (0.71, 0.6, 1), (0.41, 0.8, -1), (0.21, 0.3, 1)]).unwrap();
        let tr = track(&[(0.0, a), (0.1, b)], 0.01).unwrap();
        let x: Vec<f64> = tr.positions[1].iter().map(|p| p.x1()).collect();
        assert!((x[0] - 0.21).abs() < 1e-12 && (x[1] - 0.71).abs() < 1e-12);
        assert!((x[2] - 0.41).abs() < 1e-12 && (x[3] - 0.91).abs() < 1e-12);
    }

    #[test]
    fn collision_and_ambiguity() {
        let a = VortexConfig::from_triples(&[(0.2, 0.5, 1), (0.3, 0.5, -1)]).unwrap();
        let b = VortexConfig::from_triples(&[(0.24, 0.5, 1), (0.26, 0.5, -1)]).unwrap();
        let tr = track(&[(0.0, a.clone()), (0.1, b)], 0.01).unwrap();
        assert!(tr.collided());
        // two like-signed vortices swapped symmetrically across their midpoint
        let p = VortexConfig::from_triples(&[(0.2, 0.5, 1), (0.4, 0.5, 1), (0.7, 0.2, -1), (0.7, 0.8, -1)]).unwrap();
        let q = VortexConfig::from_triples(&[(0.3, 0.45, 1), (0.3, 0.55, 1), (0.7, 0.2, -1), (0.7, 0.8, -1)]).unwrap();
        assert!(matches!(track(&[(0.0, p), (0.1, q)], 0.001), Err(Error::AmbiguousMatching { frame: 1 })));
    }
}
