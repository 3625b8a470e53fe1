//! Minimal bipartite matching between vortex configurations of equal degree
//! content: `min_sigma sum_i |xi_i - eta_sigma(i)|` within each degree class.

use std::collections::BTreeMap;

use crate::config::VortexConfig;
use crate::error::{Error, Result};
use crate::torus::geodesic_dist;

// stands in for a forbidden pairing without poisoning the potentials with inf
const FORBIDDEN: f64 = 1e12;

/// Optimal assignment for a square cost matrix (shortest augmenting paths
/// with row and column potentials). Returns `col[row]`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; n];
    for j in 1..=n {
        col[p[j] - 1] = j - 1;
    }
    col
}

fn assignment_cost(cost: &[Vec<f64>], col: &[usize]) -> f64 {
    col.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
}

/// Cost of the best assignment that differs from `best` in at least one pair.
pub fn second_best_cost(cost: &[Vec<f64>], best: &[usize]) -> Option<f64> {
    let n = cost.len();
    if n < 2 {
        return None;
    }
    let mut out: Option<f64> = None;
    for (i, &j) in best.iter().enumerate() {
        let mut c = cost.to_vec();
        c[i][j] = FORBIDDEN;
        let col = hungarian(&c);
        let v = assignment_cost(&c, &col);
        if v < FORBIDDEN {
            out = Some(out.map_or(v, |o: f64| o.min(v)));
        }
    }
    out
}

/// An optimal labelling of `b` against `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub cost: f64,
    /// `pairs[i]` is the index in `b` matched with vortex `i` of `a`.
    pub pairs: Vec<usize>,
    /// Gap between the second-best and the best total cost, over all classes.
    pub margin: f64,
}

fn classes(cfg: &VortexConfig) -> BTreeMap<i32, Vec<usize>> {
    let mut m: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &d) in cfg.degrees().iter().enumerate() {
        m.entry(d).or_default().push(i);
    }
    m
}

pub fn match_configs(a: &VortexConfig, b: &VortexConfig) -> Result<Matching> {
    let (ca, cb) = (classes(a), classes(b));
    let shape = |m: &BTreeMap<i32, Vec<usize>>| m.iter().map(|(d, v)| (*d, v.len())).collect::<Vec<_>>();
    if shape(&ca) != shape(&cb) {
        return Err(Error::IncomparableConfigs(format!(
            "degree multisets differ: {:?} vs {:?}",
            shape(&ca),
            shape(&cb)
        )));
    }
    let mut pairs = vec![0; a.len()];
    let mut total = 0.0;
    let mut margin = f64::INFINITY;
    for (d, ia) in &ca {
        let ib = &cb[d];
        let cost: Vec<Vec<f64>> = ia
            .iter()
            .map(|&i| ib.iter().map(|&j| geodesic_dist(a.points()[i], b.points()[j])).collect())
            .collect();
        let col = hungarian(&cost);
        let c = assignment_cost(&cost, &col);
        total += c;
        if let Some(s) = second_best_cost(&cost, &col) {
            margin = margin.min(s - c);
        }
        for (r, &k) in col.iter().enumerate() {
            pairs[ia[r]] = ib[k];
        }
    }
    Ok(Matching {
        cost: total,
        pairs,
        margin,
    })
}

/// Minimal matching distance; a metric on configurations with a fixed degree content.
pub fn match_distance(a: &VortexConfig, b: &VortexConfig) -> Result<f64> {
    Ok(match_configs(a, b)?.cost)
}
