//! Vortex dynamics for the Gross-Pitaevskii (Schrödinger-Ginzburg-Landau)
//! equation on the flat unit torus, in the regime of small core size `epsilon`.
//!
//! The crate provides the torus Green function and renormalized energy, the
//! canonical harmonic map attached to a vortex configuration, a split-step
//! Fourier solver for the PDE, vortex detection and tracking diagnostics,
//! the limiting point-vortex ODE, and a harness comparing them.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod field;
pub mod green;
pub mod harmonic;
pub mod harness;
pub mod ode;
pub mod profile;
pub mod solver;
pub mod theta;
pub mod torus;
pub mod util;

pub use config::VortexConfig;
pub use error::{Error, Result};
pub use field::{FieldGrid, Snapshot};
pub use green::{build_green, grad_w, renormalized_energy, GreenTable};
pub use torus::{geodesic_dist, min_image_diff, wrap, GridSpec, TorusPoint, TorusVector};
