use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gls_vortex::harness::{self, ExperimentConfig};

#[derive(Parser)]
#[command(name = "glsv", version, about = "Vortex dynamics on the torus: PDE runs, point-vortex oracle, comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "glsv-out")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Repeat for more logging.
    #[arg(long, short, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Build, validate and cache the Green function table.
    Green {
        #[command(flatten)]
        common: Common,
        /// Table size; overrides the configuration.
        #[arg(long)]
        n: Option<usize>,
        /// Interpolation accuracy; overrides the configuration.
        #[arg(long)]
        accuracy: Option<f64>,
    },
    /// Run the PDE over the epsilon sweep, tracking vortices.
    Simulate(Common),
    /// Integrate the point-vortex system.
    Ode(Common),
    /// Compare PDE tracks against the point-vortex trajectory.
    Compare(Common),
    /// Energy-excess audit of the initial data.
    AuditEnergy(Common),
}

fn load(common: &Common, required: bool) -> gls_vortex::Result<ExperimentConfig> {
    match &common.config {
        Some(p) => ExperimentConfig::load(p),
        None if required => Err(gls_vortex::Error::Config("--config is required".into())),
        None => Ok(ExperimentConfig::headline()),
    }
}

fn verdict(name: &str, passed: bool, out: &Path) -> bool {
    println!("{name}: {} (artifacts in {})", if passed { "PASS" } else { "FAIL" }, out.display());
    passed
}

fn run(cli: Cli) -> gls_vortex::Result<bool> {
    let common = match &cli.command {
        Command::Green { common, .. }
        | Command::Simulate(common)
        | Command::Ode(common)
        | Command::Compare(common)
        | Command::AuditEnergy(common) => common,
    };
    let level = match common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs)
        .build()
        .map_err(|e| gls_vortex::Error::InvalidArgument(e.to_string()))?;
    let out = common.out.clone();
    pool.install(|| match &cli.command {
        Command::Green { common, n, accuracy } => {
            let mut cfg = load(common, false)?;
            if let Some(n) = n {
                cfg.green.n = *n;
            }
            if let Some(a) = accuracy {
                cfg.green.accuracy = *a;
            }
            cfg.validate()?;
            let r = harness::run_green(&cfg, &out)?;
            println!(
                "Green table n = {}: interpolation error {:.3e}, Laplacian order {:.3}",
                r.n, r.interpolation_error, r.laplacian_order
            );
            Ok(verdict("green", r.passed, &out))
        }
        Command::Simulate(common) => {
            let o = harness::run_simulate(&load(common, true)?, &out)?;
            for r in &o.runs {
                println!(
                    "eps = {:.5}: steps {}, mass drift {:.2e}, energy drift {:.2e}, momentum drift {:.2e}, {} frames{}",
                    r.epsilon,
                    r.steps,
                    r.mass_drift_relative,
                    r.energy_drift_relative,
                    r.momentum_drift,
                    r.frames_tracked,
                    if r.events.is_empty() { "" } else { ", events recorded" }
                );
            }
            Ok(verdict("simulate", o.passed, &out))
        }
        Command::Ode(common) => {
            let s = harness::run_ode(&load(common, true)?, &out)?;
            println!(
                "W drift {:.2e}, impulse drift {:.2e}, singularity {:?}",
                s.w_relative_drift, s.impulse_drift, s.singularity
            );
            Ok(verdict("ode", s.passed, &out))
        }
        Command::Compare(common) => {
            let r = harness::run_compare(&load(common, true)?, &out)?;
            for c in &r.criteria {
                println!("  {}: {} {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
            }
            Ok(verdict("compare", r.passed, &out))
        }
        Command::AuditEnergy(common) => {
            let r = harness::run_audit_energy(&load(common, true)?, &out)?;
            for row in &r.rows {
                println!(
                    "eps = {:.5} {:?}: gamma1 {:.4}, gamma2 {:.4}",
                    row.epsilon, row.profile, row.gamma1, row.gamma2
                );
            }
            Ok(verdict("audit-energy", r.passed, &out))
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
