//! Exact star discrepancy.
//!
//! Two routes, chosen by estimated work:
//!
//! * **Layer sweep.** Sweeps the first axis in rank order while keeping a
//!   prefix-count tensor over the remaining axes, so each candidate corner
//!   costs O(1). Work and memory scale with the candidate grid; this covers
//!   `d <= 2` up to thousands of points and `d = 3` up to several hundred.
//! * **Subset DP.** For small `N` in any dimension: fixes corner coordinates
//!   axis by axis while tracking only the set of points still inside the box
//!   (a bitmask), keeping the smallest (overfull) or largest (underfull)
//!   volume per set. Work is `d · 2^N · (N + 1)`.

use rayon::prelude::*;

use super::grid::{prefix_sum, CandidateGrid};
use super::{DiscKind, DiscrepancyEstimate, Side, Witness};
use crate::error::{Error, Result};
use crate::sampler::PointSet;

/// Largest point count handled by the subset DP.
const DP_MAX_POINTS: usize = 16;

/// Layer entries evaluated per parallel task.
const PAR_LAYER_CHUNK: usize = 1 << 14;

/// Feasibility limits for [`star_disc_exact_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Maximum estimated work, in candidate-corner evaluations.
    pub budget: f64,
    /// Maximum number of entries in one sweep layer (memory bound).
    pub max_layer: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            budget: 4_294_967_296.0,
            max_layer: 1 << 24,
        }
    }
}

/// Algorithm used by the exact engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactRoute {
    Sweep,
    SubsetDp,
}

struct Plan {
    route: ExactRoute,
}

/// Candidate counts per axis, point count, dimension.
struct Shape {
    lens: Vec<usize>,
    n: usize,
}

impl Shape {
    fn of(grid: &CandidateGrid) -> Self {
        Shape {
            lens: (0..grid.dim).map(|a| grid.len(a)).collect(),
            n: grid.n,
        }
    }

    fn sweep_cost(&self) -> (f64, f64) {
        let size: f64 = self.lens.iter().map(|&k| k as f64).product();
        let layer: f64 = self.lens.iter().skip(1).map(|&k| (k + 1) as f64).product();
        (size * self.lens.len() as f64, layer)
    }

    fn dp_cost(&self) -> Option<f64> {
        (self.n <= DP_MAX_POINTS)
            .then(|| self.lens.len() as f64 * (1u64 << self.n) as f64 * (self.n + 1) as f64)
    }
}

fn plan(shape: &Shape, opts: &ExactOptions) -> Result<Plan> {
    let (sweep_work, layer) = shape.sweep_cost();
    let sweep_ok = sweep_work <= opts.budget && layer <= opts.max_layer as f64;
    let dp = shape.dp_cost().filter(|&w| w <= opts.budget);
    let route = match (sweep_ok, dp) {
        (true, Some(w)) if w < sweep_work => ExactRoute::SubsetDp,
        (true, _) => ExactRoute::Sweep,
        (false, Some(_)) => ExactRoute::SubsetDp,
        (false, None) => {
            return Err(Error::Infeasible {
                what: "exact star discrepancy",
                work: shape.dp_cost().map_or(sweep_work, |w| w.min(sweep_work)),
                budget: opts.budget,
                hint: "use the heuristic (lower bound) or certified (upper bound) method",
            })
        }
    };
    Ok(Plan { route })
}

/// Route for a worst-case set of `n` points in dimension `d` (all
/// coordinates distinct), or the feasibility error.
pub fn exact_route_for_size(n: usize, d: usize, opts: &ExactOptions) -> Result<ExactRoute> {
    plan(&Shape { lens: vec![n + 1; d], n }, opts).map(|pl| pl.route)
}

/// The route [`star_disc_exact_with`] would take, or the feasibility error.
pub fn exact_route(p: &PointSet, opts: &ExactOptions) -> Result<ExactRoute> {
    plan(&Shape::of(&CandidateGrid::new(p)), opts).map(|pl| pl.route)
}

/// Exact `D*(P)` with default limits.
pub fn star_disc_exact(p: &PointSet) -> Result<DiscrepancyEstimate> {
    star_disc_exact_with(p, &ExactOptions::default())
}

/// Exact `D*(P)`. Fails with [`Error::Infeasible`] when neither route fits
/// the work budget.
pub fn star_disc_exact_with(p: &PointSet, opts: &ExactOptions) -> Result<DiscrepancyEstimate> {
    let grid = CandidateGrid::new(p);
    let (value, idx, side) = match plan(&Shape::of(&grid), opts)?.route {
        ExactRoute::Sweep => sweep(&grid),
        ExactRoute::SubsetDp => subset_dp(&grid),
    };
    Ok(DiscrepancyEstimate {
        value,
        kind: DiscKind::Exact,
        witness: Some(Witness {
            corner: grid.corner(&idx),
            side,
        }),
        delta: None,
    })
}

/// Best candidate within one layer: value, flat layer index, side.
type LayerBest = (f64, usize, Side);

/// Prefers larger value, then larger flat index (lexicographically larger
/// corner), then the overfull side.
#[inline]
fn layer_better(a: LayerBest, b: LayerBest) -> LayerBest {
    if (a.0, a.1, a.2) >= (b.0, b.1, b.2) || b.0.is_nan() {
        a
    } else {
        b
    }
}

fn sweep(grid: &CandidateGrid) -> (f64, Vec<u32>, Side) {
    let d = grid.dim;
    let n = grid.n as f64;

    // Layer over axes 1..d, each padded with a leading "below everything"
    // slot so strict counts are a constant diagonal offset away.
    let padded: Vec<usize> = (1..d).map(|a| grid.len(a) + 1).collect();
    let mut strides = vec![1usize; padded.len()];
    for i in (0..padded.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * padded[i + 1];
    }
    let layer_len: usize = padded.iter().product();
    let diag: usize = strides.iter().sum();

    // Volumes and the flat indices of unpadded entries, in ascending order.
    let mut vol = vec![0.0f64; layer_len];
    let mut valid: Vec<usize> = Vec::with_capacity(layer_len);
    let mut idx = vec![1usize; padded.len()];
    'odometer: loop {
        let f: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
        vol[f] = idx
            .iter()
            .enumerate()
            .fold(1.0, |v, (a, &i)| v * grid.values[a + 1][i - 1]);
        valid.push(f);
        for a in (0..idx.len()).rev() {
            idx[a] += 1;
            if idx[a] < padded[a] {
                continue 'odometer;
            }
            idx[a] = 1;
        }
        break;
    }

    // Points grouped by first-axis rank.
    let mut order: Vec<usize> = (0..grid.n).collect();
    order.sort_by_key(|&i| grid.rank(i, 0));
    let layer_pos = |i: usize| -> usize {
        (1..d)
            .map(|a| (grid.rank(i, a) as usize + 1) * strides[a - 1])
            .sum()
    };

    let mut hist = vec![0u32; layer_len];
    let mut cur = vec![0u32; layer_len];
    let mut prev = vec![0u32; layer_len];
    let mut next_point = 0usize;
    let mut best: (f64, usize, usize, Side) = (f64::NEG_INFINITY, 0, 0, Side::Underfull);

    for j in 0..grid.len(0) {
        std::mem::swap(&mut prev, &mut cur);
        let start = next_point;
        while next_point < order.len() && grid.rank(order[next_point], 0) as usize == j {
            hist[layer_pos(order[next_point])] += 1;
            next_point += 1;
        }
        if next_point > start {
            cur.copy_from_slice(&hist);
            prefix_sum(&mut cur, &padded, &strides);
        } else {
            cur.copy_from_slice(&prev);
        }

        let v0 = grid.values[0][j];
        let eval = |f: usize| -> LayerBest {
            let nv = n * (v0 * vol[f]);
            let under = nv - prev[f - diag] as f64;
            let over = cur[f] as f64 - nv;
            if over >= under {
                (over, f, Side::Overfull)
            } else {
                (under, f, Side::Underfull)
            }
        };
        let init: LayerBest = (f64::NEG_INFINITY, 0, Side::Underfull);
        let layer_best = if valid.len() > PAR_LAYER_CHUNK {
            valid
                .par_chunks(PAR_LAYER_CHUNK)
                .map(|chunk| chunk.iter().fold(init, |b, &f| layer_better(eval(f), b)))
                .reduce(|| init, layer_better)
        } else {
            valid.iter().fold(init, |b, &f| layer_better(eval(f), b))
        };
        if layer_best.0 >= best.0 {
            best = (layer_best.0, j, layer_best.1, layer_best.2);
        }
    }

    let (value, j, f, side) = best;
    let mut corner = Vec::with_capacity(d);
    corner.push(j as u32);
    for a in 0..padded.len() {
        corner.push(((f / strides[a]) % padded[a] - 1) as u32);
    }
    (value, corner, side)
}

fn subset_dp(grid: &CandidateGrid) -> (f64, Vec<u32>, Side) {
    let over = subset_dp_side(grid, Side::Overfull);
    let under = subset_dp_side(grid, Side::Underfull);
    if over.0 >= under.0 {
        over
    } else {
        under
    }
}

/// Best value on one side. Overfull keeps the minimum volume reaching each
/// closed-membership mask; underfull the maximum volume per strict mask.
fn subset_dp_side(grid: &CandidateGrid, side: Side) -> (f64, Vec<u32>, Side) {
    let n = grid.n;
    let d = grid.dim;
    let states = 1usize << n;
    let full = states - 1;
    let overfull = side == Side::Overfull;
    let unset = if overfull { f64::INFINITY } else { f64::NEG_INFINITY };
    let improves = |new: f64, old: f64| if overfull { new < old } else { new > old };

    let mut vol = vec![unset; states];
    vol[full] = 1.0;
    // back[a][mask] = (predecessor mask, candidate index chosen on axis a)
    let mut back: Vec<Vec<(u32, u32)>> = Vec::with_capacity(d);

    for a in 0..d {
        let k = grid.len(a);
        let members: Vec<usize> = (0..k)
            .map(|c| {
                (0..n)
                    .filter(|&i| {
                        let r = grid.rank(i, a) as usize;
                        if overfull {
                            r <= c
                        } else {
                            r < c
                        }
                    })
                    .fold(0usize, |m, i| m | (1 << i))
            })
            .collect();
        let mut next = vec![unset; states];
        let mut step = vec![(0u32, 0u32); states];
        for mask in 0..states {
            let v = vol[mask];
            if v == unset {
                continue;
            }
            for (c, &mem) in members.iter().enumerate() {
                let nm = mask & mem;
                let nv = v * grid.values[a][c];
                if improves(nv, next[nm]) {
                    next[nm] = nv;
                    step[nm] = (mask as u32, c as u32);
                }
            }
        }
        vol = next;
        back.push(step);
    }

    let mut best = (f64::NEG_INFINITY, 0usize);
    for (mask, &v) in vol.iter().enumerate() {
        if v == unset {
            continue;
        }
        let count = mask.count_ones() as f64;
        let value = if overfull { count - n as f64 * v } else { n as f64 * v - count };
        if value > best.0 {
            best = (value, mask);
        }
    }

    let mut corner = vec![0u32; d];
    let mut mask = best.1;
    for a in (0..d).rev() {
        let (pm, c) = back[a][mask];
        corner[a] = c;
        mask = pm as usize;
    }
    (best.0, corner, side)
}
