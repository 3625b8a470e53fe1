//! Labels vortices across frames and measures configuration distances.

use gls_vortex::diagnostics::{match_configs, track};
use gls_vortex::VortexConfig;

fn main() -> gls_vortex::Result<()> {
    let frames: Vec<(f64, VortexConfig)> = (0..6)
        .map(|k| {
            let s = 0.02 * k as f64;
            // the detector reports cores in arbitrary order; swap labels on odd frames
            let mut t = vec![(0.2 + s, 0.3, 1), (0.7, 0.6 - s, 1), (0.4, 0.8, -1), (0.9 - s, 0.1 + s, -1)];
            if k % 2 == 1 {
                t.reverse();
            }
            (0.1 * k as f64, VortexConfig::from_triples(&t).unwrap())
        })
        .collect();
    let tr = track(&frames, 0.01)?;
    for (t, pts) in tr.times.iter().zip(&tr.positions) {
        let s: Vec<String> = pts.iter().map(|p| format!("({:.2}, {:.2})", p.x1(), p.x2())).collect();
        println!("t = {t:.1}  {}", s.join(" "));
    }
    let m = match_configs(&frames[0].1, &frames[5].1)?;
    println!("first to last: cost {:.4}, assignment {:?}, margin {:.4}", m.cost, m.pairs, m.margin);
    Ok(())
}
