//! Lower-bound witness boxes for jittered point sets, and the zero-mean law
//! for the signed discrepancy of fixed rectangles.
//!
//! All schemes work on an `m`-grid jittered set `P` (one point per cube) and
//! pick, for every axis `i`, a slab
//!
//! ```text
//! R_i = [0, r)^{i-1} × [r_i, S_i) × [0, r)^{d-i}
//! ```
//!
//! whose signed discrepancy is large. The witness box is `B = ∏ [0, S_i)`.
//! In expectation `disc(B) = Σ disc(R_i)`; for a single realization the two
//! differ by the discrepancy of the leftover region `B \ (B_0 ∪ ⋃ R_i)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{signed_disc, AxisRect, Closure};
use crate::error::{Error, Result};
use crate::sampler::{generate, grid_value, PointSet, StratifiedSpec};
use crate::seed::{replication_seed, stream, unit_f64};
use crate::stats::Summary;

/// Slab occupancy below which [`WitnessScheme::SmallM`] switches to a thin
/// closed slab.
pub const SMALLM_THIN_THRESHOLD: u64 = 16;

/// Minimum replications for [`mean_disc_is_zero_test`].
pub const MIN_ZERO_TEST_REPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessScheme {
    /// Maximizing slabs above the grid corner `r`; each `r_i` must be a
    /// multiple of `1/m` in `[0, 1)`.
    Construct { r: Vec<f64> },
    /// Best of `⌊m/d⌋` half-cell slabs above `r = (m - ⌊m/d⌋)/m`.
    DiscreteLowerMain,
    /// One half-cell (or thin) slab above `r = (m - 1)/m`.
    SmallM,
}

impl WitnessScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessScheme::Construct { .. } => "construct",
            WitnessScheme::DiscreteLowerMain => "discrete",
            WitnessScheme::SmallM => "smallm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    /// Upper corner `S` of the witness box `∏ [0, S_i)`.
    pub corner: Vec<f64>,
    /// Upper-face convention used when the slabs were scored.
    pub closure: Vec<Closure>,
    /// `disc(R_i)` for each axis.
    pub per_dim_disc: Vec<f64>,
    pub total: f64,
    /// The slabs `R_i` (empty when the degenerate choice `S_i = r_i` won).
    pub slabs: Vec<AxisRect>,
    /// Signed discrepancy of the assembled box under `closure`.
    pub box_disc: f64,
    /// Grid resolution of the input set.
    pub m: u32,
}

/// Dispatches on `scheme`.
pub fn witness(p: &PointSet, scheme: &WitnessScheme) -> Result<WitnessResult> {
    match scheme {
        WitnessScheme::Construct { r } => witness_construct(p, r),
        WitnessScheme::DiscreteLowerMain => witness_discrete(p),
        WitnessScheme::SmallM => witness_smallm(p),
    }
}

/// Grid resolution `m` of a jittered set: `N = m^d` and every `m`-cube holds
/// exactly one point.
pub fn grid_resolution(p: &PointSet) -> Result<u32> {
    let d = p.dim();
    let n = p.len();
    let guess = (n as f64).powf(1.0 / d as f64).round() as u64;
    let m = (guess.saturating_sub(1)..=guess + 1)
        .find(|&m| m >= 2 && u32::try_from(d).ok().and_then(|e| m.checked_pow(e)) == Some(n as u64))
        .ok_or_else(|| Error::validation(format!("N = {n} is not m^d for d = {d} and any m >= 2")))?;
    let m = m as u32;
    let spec = StratifiedSpec::full_grid(m, d)?;
    let mut seen = vec![false; n];
    for q in p.points() {
        let cell = spec.linear_index(&spec.cell_of(q));
        if std::mem::replace(&mut seen[cell], true) {
            return Err(Error::validation(format!(
                "point set is not stratified on the {m}-grid: a cube holds two points"
            )));
        }
    }
    Ok(m)
}

/// Half-open slab on `axis`: `[lo, hi)` there, `[0, r_j)` elsewhere.
fn slab(r: &[f64], axis: usize, lo: f64, hi: f64) -> Result<AxisRect> {
    let mut a = vec![0.0; r.len()];
    let mut b = r.to_vec();
    a[axis] = lo;
    b[axis] = hi;
    AxisRect::new(a, b)
}

fn assemble(
    p: &PointSet,
    m: u32,
    corner: Vec<f64>,
    closure: Vec<Closure>,
    per_dim_disc: Vec<f64>,
    slabs: Vec<AxisRect>,
) -> Result<WitnessResult> {
    let box_disc = signed_disc(p, &AxisRect::anchored(corner.clone())?, &closure)?;
    let total = per_dim_disc.iter().sum();
    Ok(WitnessResult {
        corner,
        closure,
        per_dim_disc,
        total,
        slabs,
        box_disc,
        m,
    })
}

/// Each `S_i` maximizes the closed-face discrepancy of `R_i` over the
/// `i`-th coordinates of the points in `[0, r)^{i-1} × [r_i, 1) × [0, r)^{d-i}`
/// and `1`; ties go to the largest `S_i`.
pub fn witness_construct(p: &PointSet, r: &[f64]) -> Result<WitnessResult> {
    let m = grid_resolution(p)?;
    let d = p.dim();
    if r.len() != d {
        return Err(Error::validation(format!("r has {} entries, expected d = {d}", r.len())));
    }
    let r: Vec<f64> = r
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = (x * m as f64).round();
            if !(0.0..m as f64).contains(&k) || (k / m as f64 - x).abs() > 1e-9 {
                return Err(Error::validation(format!(
                    "r[{i}] = {x} is not a multiple of 1/{m} in [0, 1)"
                )));
            }
            Ok(grid_value(k as u32, m))
        })
        .collect::<Result<_>>()?;

    let n = p.len() as f64;
    let mut corner = Vec::with_capacity(d);
    let mut per_dim = Vec::with_capacity(d);
    let mut slabs = Vec::with_capacity(d);
    for i in 0..d {
        let mut xs: Vec<f64> = p
            .points()
            .filter(|q| q[i] >= r[i] && (0..d).all(|j| j == i || q[j] < r[j]))
            .map(|q| q[i])
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.push(1.0);
        let mut best = (f64::NEG_INFINITY, 1.0);
        for (c, &s) in xs.iter().enumerate() {
            if c + 1 < xs.len() && xs[c + 1] == s {
                continue;
            }
            let count = if s == 1.0 { xs.len() - 1 } else { c + 1 };
            let v = count as f64 - n * slab(&r, i, r[i], s)?.volume();
            if v >= best.0 {
                best = (v, s);
            }
        }
        corner.push(best.1);
        per_dim.push(best.0);
        slabs.push(slab(&r, i, r[i], best.1)?);
    }
    assemble(p, m, corner, vec![Closure::Closed; d], per_dim, slabs)
}

/// `k = ⌊m/d⌋` and the slab base `r = (m - k)/m` of the discrete scheme.
fn discrete_params(m: u32, d: usize) -> Result<(u32, f64)> {
    let k = m / d as u32;
    if k == 0 {
        return Err(Error::validation(format!("discrete witness needs m >= d, got m = {m}, d = {d}")));
    }
    Ok((k, grid_value(m - k, m)))
}

/// `z_j = r + j/m + 1/(2m)`.
fn half_cell_top(m: u32, cell: u32) -> f64 {
    grid_value(2 * cell + 1, 2 * m)
}

/// For every axis, the best of the slabs `U_j = [r, z_j) × [0, r)^{d-1}`,
/// `j < ⌊m/d⌋`, or the empty slab `S_i = r` when all are negative.
pub fn witness_discrete(p: &PointSet) -> Result<WitnessResult> {
    let m = grid_resolution(p)?;
    let d = p.dim();
    let (k, base) = discrete_params(m, d)?;
    let r = vec![base; d];
    let mut corner = Vec::with_capacity(d);
    let mut per_dim = Vec::with_capacity(d);
    let mut slabs = Vec::with_capacity(d);
    for i in 0..d {
        let mut best = (0.0, base);
        for j in 0..k {
            let s = slab(&r, i, base, half_cell_top(m, m - k + j))?;
            let v = signed_disc(p, &s, &vec![Closure::Strict; d])?;
            if v >= best.0 {
                best = (v, s.hi()[i]);
            }
        }
        corner.push(best.1);
        per_dim.push(best.0);
        slabs.push(slab(&r, i, base, best.1)?);
    }
    assemble(p, m, corner, vec![Closure::Strict; d], per_dim, slabs)
}

/// `|P ∩ T_j|` for `T_j = [y_j, z_j) × [0, r)^{d-1}` on `axis`, `j < ⌊m/d⌋`.
pub fn discrete_slab_counts(p: &PointSet, axis: usize) -> Result<Vec<usize>> {
    let m = grid_resolution(p)?;
    let d = p.dim();
    if axis >= d {
        return Err(Error::validation(format!("axis {axis} out of range for d = {d}")));
    }
    let (k, base) = discrete_params(m, d)?;
    let r = vec![base; d];
    (0..k)
        .map(|j| {
            let lo = grid_value(m - k + j, m);
            let t = slab(&r, axis, lo, half_cell_top(m, m - k + j))?;
            let strict = vec![Closure::Strict; d];
            Ok(p.points().filter(|q| t.contains(q, &strict)).count())
        })
        .collect()
}

/// `N' = (m - 1)^{d-1}`, the number of cubes a small-m slab cuts.
pub fn smallm_cells(m: u32, d: usize) -> u64 {
    (m as u64 - 1).saturating_pow(d as u32 - 1)
}

/// Per axis, the slab `[r, r + 1/(2m)) × [0, r)^{d-1}` with `r = (m-1)/m`,
/// or the closed thin slab `[r, r + 1/(2N'm)]` when `N' < 16`; the
/// contribution is clamped at zero via the empty slab.
pub fn witness_smallm(p: &PointSet) -> Result<WitnessResult> {
    let m = grid_resolution(p)?;
    let d = p.dim();
    let base = grid_value(m - 1, m);
    let r = vec![base; d];
    let cells = smallm_cells(m, d);
    let thin = cells < SMALLM_THIN_THRESHOLD;
    let (top, face) = if thin {
        let den = 2 * cells as u32 * m;
        (grid_value(2 * cells as u32 * (m - 1) + 1, den), Closure::Closed)
    } else {
        (half_cell_top(m, m - 1), Closure::Strict)
    };
    let mut corner = Vec::with_capacity(d);
    let mut per_dim = Vec::with_capacity(d);
    let mut slabs = Vec::with_capacity(d);
    let mut closure = vec![Closure::Strict; d];
    for i in 0..d {
        let s = slab(&r, i, base, top)?;
        let mut faces = vec![Closure::Strict; d];
        faces[i] = face;
        let v = signed_disc(p, &s, &faces)?;
        if v >= 0.0 {
            corner.push(top);
            per_dim.push(v);
            slabs.push(s);
            closure[i] = face;
        } else {
            corner.push(base);
            per_dim.push(0.0);
            slabs.push(slab(&r, i, base, base)?);
        }
    }
    assemble(p, m, corner, closure, per_dim, slabs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroMeanRow {
    pub rect: AxisRect,
    pub mean: f64,
    /// Sample standard deviation.
    pub std: f64,
    /// Standard deviation of `disc(rect)` under the stratified model.
    pub model_std: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroMeanReport {
    pub spec: StratifiedSpec,
    pub replications: usize,
    pub seed: u64,
    pub rows: Vec<ZeroMeanRow>,
    pub passed: usize,
}

/// Standard deviation of `disc(A)` over stratified sets drawn from `spec`.
///
/// The count in `A` is a sum of independent Bernoulli variables, one per
/// cell, with `p_c = λ(A ∩ c)/λ(c)`. Since `p_c` factors over axes into
/// per-stratum overlap fractions `f_{a,k}`,
/// `Var = Σ p_c - Σ p_c² = ∏_a Σ_k f_{a,k} - ∏_a Σ_k f_{a,k}²`.
pub fn model_std(spec: &StratifiedSpec, rect: &AxisRect) -> Result<f64> {
    if rect.dim() != spec.dim() {
        return Err(Error::validation(format!(
            "rectangle of dimension {} does not match spec dimension {}",
            rect.dim(),
            spec.dim()
        )));
    }
    let (mut s1, mut s2) = (1.0, 1.0);
    for (a, &strata) in spec.strata_per_axis().iter().enumerate() {
        let (lo, hi) = (rect.lo()[a], rect.hi()[a]);
        let (mut t1, mut t2) = (0.0, 0.0);
        for k in 0..strata {
            let (c0, c1) = (grid_value(k, strata), grid_value(k + 1, strata));
            let f = ((hi.min(c1) - lo.max(c0)).max(0.0) * strata as f64).min(1.0);
            t1 += f;
            t2 += f * f;
        }
        s1 *= t1;
        s2 *= t2;
    }
    Ok((s1 - s2).max(0.0).sqrt())
}

/// Checks `E disc(A) = 0` for each rectangle over `replications` stratified
/// sets: passes when `|mean| <= 4·σ/√R` (plus a `1e-12·N` rounding budget),
/// with `σ` from [`model_std`]. The sample deviation is reported alongside;
/// it is useless as `σ` for boxes so small that no replication hits them.
pub fn mean_disc_is_zero_test(
    spec: &StratifiedSpec,
    rects: &[AxisRect],
    replications: usize,
    seed: u64,
) -> Result<ZeroMeanReport> {
    if replications < MIN_ZERO_TEST_REPS {
        return Err(Error::validation(format!(
            "zero-mean test needs at least {MIN_ZERO_TEST_REPS} replications, got {replications}"
        )));
    }
    let d = spec.dim();
    if let Some(r) = rects.iter().find(|r| r.dim() != d) {
        return Err(Error::validation(format!(
            "rectangle of dimension {} does not match spec dimension {d}",
            r.dim()
        )));
    }
    let strict = vec![Closure::Strict; d];
    let per_rep: Vec<Vec<f64>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let p = generate(spec, replication_seed(seed, rep))?;
            rects.iter().map(|a| signed_disc(&p, a, &strict)).collect()
        })
        .collect::<Result<_>>()?;
    let n = spec.cell_count(usize::MAX)? as f64;
    let rows: Vec<ZeroMeanRow> = rects
        .iter()
        .enumerate()
        .map(|(j, rect)| {
            let xs: Vec<f64> = per_rep.iter().map(|row| row[j]).collect();
            let s = Summary::of(&xs);
            let sigma = model_std(spec, rect)?;
            Ok(ZeroMeanRow {
                rect: rect.clone(),
                mean: s.mean,
                std: s.std,
                model_std: sigma,
                pass: s.mean.abs() <= 4.0 * sigma / (replications as f64).sqrt() + 1e-12 * n,
            })
        })
        .collect::<Result<_>>()?;
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(ZeroMeanReport {
        spec: *spec,
        replications,
        seed,
        rows,
        passed,
    })
}

/// `count` random anchored boxes `[0, x)` with `x` uniform in `(0, 1]^d`.
pub fn random_anchored_rects(count: usize, d: usize, seed: u64) -> Result<Vec<AxisRect>> {
    let mut rng = stream(seed, u64::MAX);
    (0..count)
        .map(|_| AxisRect::anchored((0..d).map(|_| 1.0 - unit_f64(&mut rng)).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::star_disc_exact;
    use crate::sampler::generate_jittered;

    fn jittered(m: u32, d: usize, seed: u64) -> PointSet {
        generate_jittered(&StratifiedSpec::full_grid(m, d).unwrap(), seed).unwrap()
    }

    #[test]
    fn construct_one_dimensional() {
        let p = PointSet::from_points(&[vec![0.1], vec![0.6]]).unwrap();
        let w = witness_construct(&p, &[0.5]).unwrap();
        assert_eq!(w.corner, vec![0.6]);
        assert!((w.per_dim_disc[0] - 0.8).abs() < 1e-15);
        assert!((w.total - 0.8).abs() < 1e-15);
    }

    #[test]
    fn construct_contributions_are_nonnegative() {
        for seed in 0..50 {
            let p = jittered(6, 3, seed);
            let w = witness_construct(&p, &[0.5, 2.0 / 6.0, 0.0]).unwrap();
            assert!(w.per_dim_disc.iter().all(|&v| v >= 0.0), "{:?}", w.per_dim_disc);
            // r_3 = 0 leaves the other slabs empty.
            assert_eq!(w.per_dim_disc[0], 0.0);
            assert_eq!(w.corner[0], 1.0);
        }
    }

    #[test]
    fn construct_rejects_off_grid_r() {
        let p = jittered(4, 2, 1);
        assert!(witness_construct(&p, &[0.3, 0.5]).is_err());
        assert!(witness_construct(&p, &[1.0, 0.5]).is_err());
        assert!(witness_construct(&p, &[0.5]).is_err());
    }

    #[test]
    fn grid_resolution_detects_structure() {
        assert_eq!(grid_resolution(&jittered(5, 3, 2)).unwrap(), 5);
        let uneven = PointSet::from_points(&[vec![0.1], vec![0.2]]).unwrap();
        assert!(grid_resolution(&uneven).is_err());
        let three = PointSet::from_points(&[vec![0.1], vec![0.2], vec![0.9]]).unwrap();
        assert!(grid_resolution(&three).is_err());
    }

    #[test]
    fn discrete_matches_slab_oracle() {
        for seed in 0..20 {
            let p = jittered(8, 2, seed);
            let w = witness_discrete(&p).unwrap();
            let r = 4.0 / 8.0;
            for i in 0..2 {
                let mut best = 0.0f64;
                for j in 0..4 {
                    let mut hi = vec![r, r];
                    hi[i] = r + j as f64 / 8.0 + 1.0 / 16.0;
                    let mut lo = vec![0.0, 0.0];
                    lo[i] = r;
                    let u = AxisRect::new(lo, hi).unwrap();
                    best = best.max(signed_disc(&p, &u, &[Closure::Strict; 2]).unwrap());
                }
                assert!((w.per_dim_disc[i] - best).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn discrete_slabs_are_disjoint_and_counted() {
        let p = jittered(8, 2, 3);
        let counts = discrete_slab_counts(&p, 0).unwrap();
        assert_eq!(counts.len(), 4);
        // Each T_j cuts (m - k)^{d-1} = 4 cubes.
        assert!(counts.iter().all(|&c| c <= 4));
        assert!(witness_discrete(&jittered(2, 3, 1)).is_err());
    }

    #[test]
    fn smallm_thin_branch() {
        assert_eq!(smallm_cells(2, 2), 1);
        let p = jittered(2, 2, 5);
        let w = witness_smallm(&p).unwrap();
        for i in 0..2 {
            assert!(w.corner[i] == 0.5 || w.corner[i] == 0.75);
        }
        assert_eq!(smallm_cells(5, 3), 16);
    }

    #[test]
    fn smallm_total_against_exact() {
        for m in [2u32, 3, 4] {
            for seed in 0..30 {
                let p = jittered(m, 2, seed);
                let w = witness_smallm(&p).unwrap();
                assert!(w.per_dim_disc.iter().all(|&v| v >= 0.0));
                let exact = star_disc_exact(&p).unwrap().value;
                assert!(w.box_disc.abs() <= exact + 1e-9);
            }
        }
    }

    #[test]
    fn model_std_matches_sample_std() {
        let spec = StratifiedSpec::full_grid(4, 2).unwrap();
        let rect = AxisRect::anchored(vec![0.37, 0.61]).unwrap();
        let rep = mean_disc_is_zero_test(&spec, &[rect], 20_000, 3).unwrap();
        let row = &rep.rows[0];
        assert!(row.model_std > 0.0);
        assert!((row.std / row.model_std - 1.0).abs() < 0.05);
    }

    #[test]
    fn zero_test_on_aligned_box_is_exact() {
        let spec = StratifiedSpec::full_grid(8, 2).unwrap();
        let rect = AxisRect::anchored(vec![0.5, 0.25]).unwrap();
        let rep = mean_disc_is_zero_test(&spec, &[rect], 1000, 7).unwrap();
        assert_eq!(rep.rows[0].mean, 0.0);
        assert_eq!(rep.rows[0].std, 0.0);
        assert_eq!(rep.rows[0].model_std, 0.0);
        assert!(rep.rows[0].pass);
        assert!(mean_disc_is_zero_test(&spec, &[], 10, 7).is_err());
    }

    #[test]
    fn random_rects_are_anchored() {
        let rects = random_anchored_rects(10, 3, 1).unwrap();
        assert!(rects.iter().all(|r| r.lo() == [0.0; 3] && r.hi().iter().all(|&x| x > 0.0 && x <= 1.0)));
    }
}
