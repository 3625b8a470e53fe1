//! Small numerical helpers shared across modules.

/// `P(t) = 35t^4 - 84t^5 + 70t^6 - 20t^7`, a `C^3` step from 0 to 1 on `[0, 1]`.
/// Returns `(P, P', P'')`.
pub fn smoothstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let v = t4 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t3);
    let d1 = 140.0 * t3 * (1.0 - t) * (1.0 - t) * (1.0 - t);
    let d2 = 420.0 * t2 * (1.0 - t) * (1.0 - t) * (1.0 - 2.0 * t);
    (v, d1, d2)
}

/// Radial cutoff equal to 1 for `r <= r0` and 0 for `r >= r1`.
/// Returns `(chi, chi', chi'')` as functions of `r`.
pub fn radial_cutoff(r: f64, r0: f64, r1: f64) -> (f64, f64, f64) {
    let w = r1 - r0;
    let (p, p1, p2) = smoothstep((r - r0) / w);
    (1.0 - p, -p1 / w, -p2 / (w * w))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Radical-inverse (Halton) low-discrepancy point in `[0, 1)`.
pub fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Least-squares line `y = a + b x`; returns `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_endpoints_and_derivative() {
        assert_eq!(smoothstep(0.0).0, 0.0);
        assert_eq!(smoothstep(1.0).0, 1.0);
        let t = 0.37;
        let h = 1e-6;
        let fd = (smoothstep(t + h).0 - smoothstep(t - h).0) / (2.0 * h);
        assert!((fd - smoothstep(t).1).abs() < 1e-8);
        let fd2 = (smoothstep(t + h).1 - smoothstep(t - h).1) / (2.0 * h);
        assert!((fd2 - smoothstep(t).2).abs() < 1e-6);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
