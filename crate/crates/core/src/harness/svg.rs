//! Standalone SVG figures: trajectories on the unit square and a log-log
//! error plot.

use std::fmt::Write;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub name: String,
    /// `paths[label]` is the sequence of wrapped positions of one vortex.
    pub paths: Vec<Vec<[f64; 2]>>,
    pub dashed: bool,
}

/// Splits a wrapped path wherever consecutive points straddle a seam.
pub fn split_at_seams(path: &[[f64; 2]]) -> Vec<Vec<[f64; 2]>> {
    let mut out: Vec<Vec<[f64; 2]>> = Vec::new();
    for (k, p) in path.iter().enumerate() {
        let jump = k > 0 && {
            let q = path[k - 1];
            (p[0] - q[0]).abs() > 0.5 || (p[1] - q[1]).abs() > 0.5
        };
        if k == 0 || jump {
            out.push(Vec::new());
        }
        out.last_mut().unwrap().push(*p);
    }
    out
}

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

pub fn trajectory_overlay(series: &[Series]) -> String {
    let (size, pad) = (480.0, 40.0);
    let map = |p: [f64; 2]| (pad + p[0] * size, pad + (1.0 - p[1]) * size);
    let mut s = header(size + 2.0 * pad + 160.0, size + 2.0 * pad);
    let _ = writeln!(
        s,
        "<rect x=\"{pad}\" y=\"{pad}\" width=\"{size}\" height=\"{size}\" fill=\"none\" stroke=\"black\"/>"
    );
    for (k, ser) in series.iter().enumerate() {
        let colour = if ser.dashed { "black" } else { PALETTE[k % PALETTE.len()] };
        let dash = if ser.dashed { " stroke-dasharray=\"4 3\"" } else { "" };
        for path in &ser.paths {
            for piece in split_at_seams(path) {
                let pts: Vec<String> = piece
                    .iter()
                    .map(|p| {
                        let (x, y) = map(*p);
                        format!("{x:.2},{y:.2}")
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"{dash}/>",
                    pts.join(" ")
                );
            }
            if let Some(p) = path.first() {
                let (x, y) = map(*p);
                let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{colour}\"/>");
            }
        }
        let ly = pad + 16.0 * (k as f64 + 1.0);
        let lx = size + 2.0 * pad;
        let _ = writeln!(
            s,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{colour}\" stroke-width=\"2\"{dash}/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>",
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            ser.name
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Log-log scatter of `(epsilon, error)` pairs joined by a line.
pub fn error_vs_epsilon(points: &[(f64, f64)], title: &str) -> String {
    let (w, h, pad) = (480.0, 360.0, 60.0);
    let good: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(e, v)| *e > 0.0 && *v > 0.0 && v.is_finite())
        .collect();
    let mut s = header(w + 2.0 * pad, h + 2.0 * pad);
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\">{title}</text>",
        pad + w / 2.0
    );
    let _ = writeln!(
        s,
        "<rect x=\"{pad}\" y=\"{pad}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"black\"/>"
    );
    if good.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let lx: Vec<f64> = good.iter().map(|p| p.0.log10()).collect();
    let ly: Vec<f64> = good.iter().map(|p| p.1.log10()).collect();
    let range = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min).floor();
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
        if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) }
    };
    let ((x0, x1), (y0, y1)) = (range(&lx), range(&ly));
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * w;
    let py = |y: f64| pad + (1.0 - (y - y0) / (y1 - y0)) * h;
    for d in (x0 as i64)..=(x1 as i64) {
        let x = px(d as f64);
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">1e{d}</text>",
            pad + h + 16.0
        );
    }
    for d in (y0 as i64)..=(y1 as i64) {
        let y = py(d as f64);
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{:.1}\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">1e{d}</text>",
            pad - 6.0,
            y + 4.0
        );
    }
    let pts: Vec<String> = lx.iter().zip(&ly).map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
    let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>", pts.join(" "), PALETTE[0]);
    for (x, y) in lx.iter().zip(&ly) {
        let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\"/>", px(*x), py(*y), PALETTE[0]);
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">epsilon</text>",
        pad + w / 2.0,
        pad + h + 36.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seam_crossing_splits_the_path() {
        let path = [[0.9, 0.5], [0.98, 0.5], [0.03, 0.5], [0.1, 0.5]];
        let pieces = split_at_seams(&path);
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[1][0], [0.03, 0.5]);
    }

    #[test]
    fn figures_are_well_formed() {
        let s = trajectory_overlay(&[Series {
            name: "ode".into(),
            paths: vec![vec![[0.1, 0.1], [0.95, 0.1], [0.05, 0.1]]],
            dashed: true,
        }]);
        assert_eq!(s.matches("<polyline").count(), 3);
        assert!(s.trim_end().ends_with("</svg>"));
        let e = error_vs_epsilon(&[(0.1, 0.02), (0.05, 0.005)], "sup error");
        assert_eq!(e.matches("<circle").count(), 2);
    }
}
