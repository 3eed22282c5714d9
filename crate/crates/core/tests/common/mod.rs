#![allow(dead_code)]

use std::io::Write;

use jitterdisc::sampler::PointSet;

/// Star discrepancy by enumerating every corner of the full grid built from
/// all point coordinates plus `1.0` on each axis.
pub fn brute_force_star_disc(p: &PointSet) -> f64 {
    let (n, d) = (p.len(), p.dim());
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|a| {
            let mut v: Vec<f64> = p.points().map(|q| q[a]).collect();
            v.push(1.0);
            v
        })
        .collect();
    let mut idx = vec![0usize; d];
    let mut best = 0.0f64;
    loop {
        let y: Vec<f64> = (0..d).map(|a| axes[a][idx[a]]).collect();
        let vol: f64 = y.iter().product();
        let closed = p.points().filter(|q| q.iter().zip(&y).all(|(x, t)| x <= t)).count();
        let open = p.points().filter(|q| q.iter().zip(&y).all(|(x, t)| x < t)).count();
        best = best.max(closed as f64 - n as f64 * vol);
        best = best.max(n as f64 * vol - open as f64);
        let mut a = 0;
        loop {
            if a == d {
                return best;
            }
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Prints one verdict line, bypassing the test harness's output capture.
pub fn verdict(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[acceptance] {tag} {criterion}: {detail}");
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
