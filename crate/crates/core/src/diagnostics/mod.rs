//! Measurement instruments: currents and Jacobians, vortex detection,
//! minimal matching, path tracking, and numerical checks of the evolution
//! identities.

pub mod current;
pub mod detect;
pub mod identities;
pub mod matching;
pub mod track;

pub use track::{track, track_snapshots, TrackEvent, VortexTrack};
pub use matching::{match_configs, match_distance, Matching};
pub use identities::{lemma1_identity_check, weak_jacobian_rate_check, IdentityGap, RateCheck};
pub use detect::{detect_vortices, DetectOptions, Detection, Locator};
pub use current::{current_j, energy_measure, jacobian, jacobian_pairing, mean_current, Jet, Region, TestFunction};
