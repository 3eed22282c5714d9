//! Multi-restart coordinate ascent over the candidate grid.

use rayon::prelude::*;

use super::grid::CandidateGrid;
use super::{DiscKind, DiscrepancyEstimate, Side, Witness};
use crate::error::{Error, Result};
use crate::sampler::PointSet;
use crate::seed::stream;
use rand::Rng;

pub const DEFAULT_RESTARTS: usize = 16;

/// Safety stop; ascent terminates on its own long before this.
const MAX_PASSES: usize = 10_000;

/// Lower bound on `D*(P)` from `restarts` coordinate-ascent runs per side.
///
/// Each run starts from a random candidate corner and re-optimizes one
/// coordinate at a time, holding the others fixed, until a full pass
/// changes nothing. Ties go to the larger candidate, and across runs to the
/// lexicographically largest corner.
pub fn star_disc_heuristic(p: &PointSet, restarts: usize, seed: u64) -> Result<DiscrepancyEstimate> {
    if p.is_empty() {
        return Err(Error::validation("heuristic discrepancy needs N >= 1"));
    }
    if restarts == 0 {
        return Err(Error::validation("restarts must be >= 1"));
    }
    let grid = CandidateGrid::new(p);
    let best = (0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, r);
            let start: Vec<u32> = (0..grid.dim)
                .map(|a| rng.random_range(0..grid.len(a) as u32))
                .collect();
            let over = ascend(&grid, start.clone(), Side::Overfull);
            let under = ascend(&grid, start, Side::Underfull);
            better(over, under)
        })
        .reduce_with(better)
        .expect("restarts >= 1");
    Ok(DiscrepancyEstimate {
        value: best.0,
        kind: DiscKind::LowerWitness,
        witness: Some(Witness {
            corner: grid.corner(&best.1),
            side: best.2,
        }),
        delta: None,
    })
}

type Candidate = (f64, Vec<u32>, Side);

fn better(a: Candidate, b: Candidate) -> Candidate {
    if (a.0, &a.1, a.2) >= (b.0, &b.1, b.2) {
        a
    } else {
        b
    }
}

fn objective(grid: &CandidateGrid, count: usize, vol: f64, side: Side) -> f64 {
    let nv = grid.n as f64 * vol;
    match side {
        Side::Overfull => count as f64 - nv,
        Side::Underfull => nv - count as f64,
    }
}

fn ascend(grid: &CandidateGrid, mut idx: Vec<u32>, side: Side) -> Candidate {
    let d = grid.dim;
    let closed = side == Side::Overfull;
    let inside = |r: u32, c: u32| if closed { r <= c } else { r < c };
    let mut buckets: Vec<usize> = Vec::new();
    let mut value = f64::NEG_INFINITY;

    for _ in 0..MAX_PASSES {
        let mut changed = false;
        for a in 0..d {
            let k = grid.len(a);
            buckets.clear();
            buckets.resize(k, 0);
            for i in 0..grid.n {
                if (0..d).all(|b| b == a || inside(grid.rank(i, b), idx[b])) {
                    buckets[grid.rank(i, a) as usize] += 1;
                }
            }
            let mut count = 0usize;
            let mut best = (f64::NEG_INFINITY, idx[a]);
            let mut trial = idx.clone();
            for c in 0..k {
                // Closed faces include points of rank c; strict ones stop below.
                if closed {
                    count += buckets[c];
                }
                trial[a] = c as u32;
                let v = objective(grid, count, grid.volume(&trial), side);
                if v >= best.0 {
                    best = (v, c as u32);
                }
                if !closed {
                    count += buckets[c];
                }
            }
            if best.1 != idx[a] {
                changed = true;
                idx[a] = best.1;
            }
            value = best.0;
        }
        if !changed {
            break;
        }
    }
    (value, idx, side)
}
