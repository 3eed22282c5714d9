//! Upper bound on `D*` from an equidistant bracketing cover.

use rayon::prelude::*;

use super::grid::prefix_sum;
use super::{CoverSpec, DiscKind, DiscrepancyEstimate, Side, Witness};
use crate::error::{Error, Result};
use crate::sampler::{grid_value, stratum_of, PointSet};

const PAR_CHUNK: usize = 1 << 14;

/// Limits for [`star_disc_certified_upper_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifiedOptions {
    /// Maximum number of grid corners `(M + 1)^d`.
    pub max_corners: usize,
}

impl Default for CertifiedOptions {
    fn default() -> Self {
        CertifiedOptions { max_corners: 1 << 26 }
    }
}

/// `max_y max(disc⁺(y), disc⁻(y)) + N·δ̄` over the corners `y` of the cover
/// grid, where `δ̄ = 1 - (1 - 1/M)^d`. Always at least `D*(P)`.
pub fn star_disc_certified_upper(p: &PointSet, cover: &CoverSpec) -> Result<DiscrepancyEstimate> {
    star_disc_certified_upper_with(p, cover, &CertifiedOptions::default())
}

pub fn star_disc_certified_upper_with(
    p: &PointSet,
    cover: &CoverSpec,
    opts: &CertifiedOptions,
) -> Result<DiscrepancyEstimate> {
    let d = p.dim();
    if cover.dim != d {
        return Err(Error::validation(format!(
            "cover dimension {} does not match point set dimension {d}",
            cover.dim
        )));
    }
    let m = cover.grid;
    let side = m as usize + 1;
    let corners = (side as f64).powi(d as i32);
    if corners > opts.max_corners as f64 {
        return Err(Error::Infeasible {
            what: "certified upper bound",
            work: corners,
            budget: opts.max_corners as f64,
            hint: "use a smaller grid M (larger delta)",
        });
    }
    let len = corners as usize;
    let mut strides = vec![1usize; d];
    for a in (0..d.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * side;
    }

    // Entry at corner c counts points below it: strict when p < c/M on every
    // axis, closed when p <= c/M.
    let mut strict = vec![0u32; len];
    let mut closed = vec![0u32; len];
    for q in p.points() {
        let mut fs = 0;
        let mut fc = 0;
        for (a, &x) in q.iter().enumerate() {
            let k = stratum_of(x, m);
            fs += (k as usize + 1) * strides[a];
            let on_line = grid_value(k, m) == x;
            fc += (k as usize + usize::from(!on_line)) * strides[a];
        }
        strict[fs] += 1;
        closed[fc] += 1;
    }
    let shape = vec![side; d];
    prefix_sum(&mut strict, &shape, &strides);
    prefix_sum(&mut closed, &shape, &strides);

    let n = p.len() as f64;
    let axis: Vec<f64> = (0..=m).map(|k| grid_value(k, m)).collect();
    let eval = |f: usize| -> (f64, usize, Side) {
        let vol = strides
            .iter()
            .fold(1.0, |v, &s| v * axis[(f / s) % side]);
        let nv = n * vol;
        let under = nv - strict[f] as f64;
        let over = closed[f] as f64 - nv;
        if over >= under {
            (over, f, Side::Overfull)
        } else {
            (under, f, Side::Underfull)
        }
    };
    let pick = |a: (f64, usize, Side), b: (f64, usize, Side)| if a >= b { a } else { b };
    let init = (f64::NEG_INFINITY, 0usize, Side::Underfull);
    let (best, f, side_hit) = (0..len)
        .into_par_iter()
        .with_min_len(PAR_CHUNK)
        .fold(|| init, |b, f| pick(eval(f), b))
        .reduce(|| init, pick);

    let corner: Vec<f64> = strides.iter().map(|&s| axis[(f / s) % side]).collect();
    Ok(DiscrepancyEstimate {
        value: best + n * cover.delta,
        kind: DiscKind::CertifiedUpper,
        witness: Some(Witness { corner, side: side_hit }),
        delta: Some(cover.delta),
    })
}
