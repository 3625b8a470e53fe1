//! Integrates the point-vortex system and reports invariant drift.

use gls_vortex::ode::{evolve, OdeState};
use gls_vortex::{build_green, GridSpec, VortexConfig};

fn main() -> gls_vortex::Result<()> {
    let table = build_green(GridSpec::new(128)?, 1e-3)?;
    let cfg = VortexConfig::from_triples(&[(0.25, 0.2, 1), (0.25, 0.7, -1), (0.75, 0.8, 1), (0.75, 0.3, -1)])?;
    let state = OdeState::new(&table, &cfg)?;
    let tr = evolve(&table, &state, 1.0, 1e-10, 0.1)?;
    for f in &tr.frames {
        let a = f.lifted[0];
        println!("t = {:.2}  a_0 = ({:.6}, {:.6})  W = {:.12}", f.t, a[0], a[1], f.w);
    }
    println!("W drift {:.2e}, impulse drift {:.2e}", tr.max_w_drift(), tr.max_impulse_drift());
    Ok(())
}
