//! Evolves a vortex dipole under the Schrodinger flow and prints the
//! conserved quantities and detected cores.

use gls_vortex::diagnostics::{detect_vortices, DetectOptions};
use gls_vortex::harmonic::make_initial_data;
use gls_vortex::profile::{CoreProfile, ProfileKind};
use gls_vortex::solver::{default_dt, SolverState};
use gls_vortex::{GridSpec, VortexConfig};

fn main() -> gls_vortex::Result<()> {
    let eps = 0.1;
    let grid = GridSpec::new(128)?;
    let cfg = VortexConfig::from_triples(&[(0.3, 0.4, 1), (0.55, 0.52, -1)])?;
    let profile = CoreProfile::new(ProfileKind::Numerical)?;
    let init = make_initial_data(&cfg, eps, grid, &profile)?;
    println!("background current {:?}", init.background);
    let mut state = SolverState::new(init.field, eps, 0.0, default_dt(eps, grid))?;
    let opts = DetectOptions::for_epsilon(eps);
    state.evolve(0.02, 0.005, |s| {
        let r = s.conserved_log().last().copied();
        let det = detect_vortices(s.field(), &opts)?;
        let pts: Vec<String> = det
            .config
            .points()
            .iter()
            .zip(det.config.degrees())
            .map(|(p, d)| format!("{d:+}@({:.4}, {:.4})", p.x1(), p.x2()))
            .collect();
        if let Some(r) = r {
            println!("t = {:.4}  E = {:.8}  M = {:.10}  {}", s.time(), r.energy, r.mass, pts.join(" "));
        }
        Ok(())
    })?;
    Ok(())
}
