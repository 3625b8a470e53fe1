//! Runs a short version of the full comparison pipeline into a directory
//! (default `headline-out`) and prints each criterion.

use std::path::PathBuf;

use gls_vortex::harness::{run_compare, run_ode, run_simulate, ExperimentConfig, VortexSpec};

fn main() -> gls_vortex::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "headline-out".into()));
    let mut cfg = ExperimentConfig::headline();
    cfg.vortices = vec![
        VortexSpec { x: 0.25, y: 0.2, d: 1 },
        VortexSpec { x: 0.25, y: 0.7, d: -1 },
        VortexSpec { x: 0.75, y: 0.8, d: 1 },
        VortexSpec { x: 0.75, y: 0.3, d: -1 },
    ];
    cfg.epsilons = vec![0.1, 0.0707];
    cfg.grid_n = Some(vec![64, 128]);
    cfg.t_final = 0.01;
    cfg.snapshot_every = 0.001;
    run_ode(&cfg, &out)?;
    run_simulate(&cfg, &out)?;
    let report = run_compare(&cfg, &out)?;
    for c in &report.criteria {
        println!("{}: {} {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
    }
    println!("artifacts in {}", out.display());
    Ok(())
}
