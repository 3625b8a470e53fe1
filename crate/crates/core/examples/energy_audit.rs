//! Splits the energy of eps-scale initial data into core, interaction and
//! remainder terms for a few epsilons.

use gls_vortex::harness::{audit::audit, ExperimentConfig, VortexSpec};
use gls_vortex::{build_green, GridSpec};

fn main() -> gls_vortex::Result<()> {
    let mut cfg = ExperimentConfig::headline();
    cfg.vortices = vec![
        VortexSpec { x: 0.25, y: 0.2, d: 1 },
        VortexSpec { x: 0.25, y: 0.7, d: -1 },
        VortexSpec { x: 0.75, y: 0.8, d: 1 },
        VortexSpec { x: 0.75, y: 0.3, d: -1 },
    ];
    cfg.epsilons = vec![0.1, 0.05];
    cfg.grid_n = Some(vec![128, 256]);
    let table = build_green(GridSpec::new(256)?, 1e-3)?;
    let report = audit(&cfg, &table)?;
    println!("W = {:.6}, core constant {:.6}", report.w, report.core_constant);
    for row in &report.rows {
        println!(
            "eps = {:.4} {:>9}: I = {:.5}, I - m pi log(1/eps) = {:.5}, remainder {:+.4}",
            row.epsilon, format!("{:?}", row.profile), row.energy, row.gamma1, row.gamma2
        );
    }
    Ok(())
}
