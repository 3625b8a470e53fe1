//! Solves for the radial degree-one core profile and compares it with tanh.

use std::f64::consts::PI;

use gls_vortex::profile::{CoreProfile, ProfileKind};

fn main() -> gls_vortex::Result<()> {
    let minimizer = CoreProfile::new(ProfileKind::Numerical)?;
    let tanh = CoreProfile::new(ProfileKind::Tanh)?;
    println!("f'(0) = {:.8}", minimizer.slope_at_origin());
    println!("{:>6} {:>12} {:>12}", "r", "minimizer", "tanh");
    for r in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        println!("{r:6.2} {:12.8} {:12.8}", minimizer.value(r), tanh.value(r));
    }
    for (name, p) in [("minimizer", &minimizer), ("tanh", &tanh)] {
        let r = 100.0;
        println!("{name}: disc energy - pi log R at R = {r}: {:.6}", p.disc_energy(r) - PI * r.ln());
    }
    println!("core constant {:.6}", minimizer.core_constant());
    Ok(())
}
