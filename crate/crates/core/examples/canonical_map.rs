//! Builds the canonical harmonic map for a neutral four-vortex configuration
//! and checks its winding numbers and mean current.

use gls_vortex::diagnostics::{detect_vortices, mean_current, DetectOptions};
use gls_vortex::fft::Fft2;
use gls_vortex::harmonic::{canonical_map, CanonicalMap};
use gls_vortex::{GridSpec, VortexConfig};

fn main() -> gls_vortex::Result<()> {
    let cfg = VortexConfig::from_triples(&[(0.25, 0.2, 1), (0.25, 0.7, -1), (0.75, 0.8, 1), (0.75, 0.3, -1)])?;
    let grid = GridSpec::new(128)?;
    let field = canonical_map(&cfg, grid, 0.0)?;
    let det = detect_vortices(&field, &DetectOptions::for_unit_maps(1))?;
    for (p, d) in det.config.points().iter().zip(det.config.degrees()) {
        println!("winding {d:+} at ({:.5}, {:.5})", p.x1(), p.x2());
    }
    let j = mean_current(&field, &Fft2::new(grid));
    println!("mean current ({:.2e}, {:.2e})", j[0], j[1]);

    // a single dipole cannot carry zero mean current; the closest map has a background
    let dipole = VortexConfig::from_triples(&[(0.25, 0.5, 1), (0.75, 0.5, -1)])?;
    match canonical_map(&dipole, grid, 0.0) {
        Ok(_) => println!("dipole map built"),
        Err(e) => println!("dipole: {e}"),
    }
    let h = CanonicalMap::lattice_minimal(&dipole, 0.0)?;
    println!("dipole background current {:?}", h.background());
    Ok(())
}
