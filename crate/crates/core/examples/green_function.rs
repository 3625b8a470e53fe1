//! Tabulates the periodic Green function and its gradient along a ray.

use gls_vortex::{build_green, GridSpec, TorusVector};

fn main() -> gls_vortex::Result<()> {
    let table = build_green(GridSpec::new(128)?, 1e-3)?;
    println!("c0 = {:.12}", table.c0());
    println!("{:>8} {:>16} {:>16} {:>16}", "r", "F", "F - log r", "|grad F|");
    for k in 1..=10 {
        let r = 0.05 * k as f64;
        let v = TorusVector::from_raw(r * 0.8, r * 0.6);
        let f = table.eval_f(v)?;
        let g = table.eval_grad_f(v)?;
        println!("{r:8.3} {f:16.10} {:16.10} {:16.10}", f - r.ln(), g[0].hypot(g[1]));
    }
    Ok(())
}
