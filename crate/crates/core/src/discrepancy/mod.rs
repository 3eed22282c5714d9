//! Signed discrepancy of rectangles and the (non-normalized) star discrepancy
//! `D*(P) = sup_x | |P ∩ [0,x)| - N λ([0,x)) |`.
//!
//! Three estimators share one result type:
//!
//! * [`star_disc_exact`]: exact value by enumeration of the critical grid,
//! * [`star_disc_heuristic`]: coordinate-ascent search, a lower bound,
//! * [`star_disc_certified_upper`]: equidistant bracketing cover, an upper bound.
//!
//! The supremum runs over half-open anchored boxes. It is realized as a
//! maximum over the critical grid (per-axis point coordinates plus `1.0`):
//! overfull boxes are scored with closed upper faces (`count(p <= y)`, the
//! right limit of the count) and underfull boxes with strict upper faces
//! (`count(p < y)`). The reported value may therefore be a supremum that no
//! single half-open box attains.

mod certified;
mod exact;
mod grid;
mod heuristic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::PointSet;

pub use certified::{star_disc_certified_upper, star_disc_certified_upper_with, CertifiedOptions};
pub use exact::{exact_route, exact_route_for_size, star_disc_exact, star_disc_exact_with, ExactOptions, ExactRoute};
pub use heuristic::{star_disc_heuristic, DEFAULT_RESTARTS};

/// Half-open axis-aligned rectangle `[lo, hi)` inside the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRect {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisRect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::validation(format!(
                "rectangle corners must have equal nonzero length, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !(0.0 <= a && a <= b && b <= 1.0) {
                return Err(Error::validation(format!(
                    "axis {i}: need 0 <= lo <= hi <= 1, got lo={a}, hi={b}"
                )));
            }
        }
        Ok(AxisRect { lo, hi })
    }

    /// The anchored box `[0, hi)`.
    pub fn anchored(hi: Vec<f64>) -> Result<Self> {
        AxisRect::new(vec![0.0; hi.len()], hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Lebesgue measure, as the sequential product of side lengths.
    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).fold(1.0, |v, (a, b)| v * (b - a))
    }

    /// Membership under per-axis upper-face closure.
    pub fn contains(&self, p: &[f64], closure: &[Closure]) -> bool {
        p.iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .zip(closure)
            .all(|(((&x, &a), &b), c)| x >= a && c.below(x, b))
    }
}

/// Treatment of a rectangle's upper face on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// `x < hi`
    Strict,
    /// `x <= hi`
    Closed,
}

impl Closure {
    #[inline]
    fn below(self, x: f64, hi: f64) -> bool {
        match self {
            Closure::Strict => x < hi,
            Closure::Closed => x <= hi,
        }
    }
}

/// `|P ∩ rect| - N·λ(rect)`, counting `p_i >= lo_i` at the lower face and
/// per-axis `closure` at the upper face.
pub fn signed_disc(p: &PointSet, rect: &AxisRect, closure: &[Closure]) -> Result<f64> {
    if rect.dim() != p.dim() || closure.len() != p.dim() {
        return Err(Error::validation(format!(
            "dimension mismatch: point set d={}, rectangle d={}, closure mask length {}",
            p.dim(),
            rect.dim(),
            closure.len()
        )));
    }
    let count = p.points().filter(|q| rect.contains(q, closure)).count();
    Ok(count as f64 - p.len() as f64 * rect.volume())
}

/// [`signed_disc`] with strict upper faces on every axis.
pub fn signed_disc_strict(p: &PointSet, rect: &AxisRect) -> Result<f64> {
    signed_disc(p, rect, &vec![Closure::Strict; rect.dim()])
}

/// How a [`DiscrepancyEstimate`] relates to the true `D*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscKind {
    Exact,
    LowerWitness,
    CertifiedUpper,
}

impl std::fmt::Display for DiscKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiscKind::Exact => "exact",
            DiscKind::LowerWitness => "lower_witness",
            DiscKind::CertifiedUpper => "certified_upper",
        })
    }
}

/// Whether the witness box holds too many or too few points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `N·λ - count(p < y)`; scored with strict upper faces.
    Underfull,
    /// `count(p <= y) - N·λ`; scored with closed upper faces.
    Overfull,
}

/// Anchored-box corner attaining (or approaching) an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub corner: Vec<f64>,
    pub side: Side,
}

impl Witness {
    /// Recomputes the witness's signed value on `p` (positive when it
    /// supports the estimate).
    pub fn evaluate(&self, p: &PointSet) -> Result<f64> {
        let rect = AxisRect::anchored(self.corner.clone())?;
        match self.side {
            Side::Overfull => signed_disc(p, &rect, &vec![Closure::Closed; p.dim()]),
            Side::Underfull => Ok(-signed_disc(p, &rect, &vec![Closure::Strict; p.dim()])?),
        }
    }
}

/// A star discrepancy value with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyEstimate {
    pub value: f64,
    pub kind: DiscKind,
    pub witness: Option<Witness>,
    /// Bracketing gap of the cover, for [`DiscKind::CertifiedUpper`].
    pub delta: Option<f64>,
}

impl DiscrepancyEstimate {
    /// `value / n`.
    pub fn normalized(&self, n: usize) -> Result<f64> {
        normalized(self.value, n)
    }
}

/// Normalized star discrepancy `value / n`.
pub fn normalized(value: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::validation("normalization requires N >= 1"));
    }
    Ok(value / n as f64)
}

/// Equidistant-grid bracketing cover `{0, 1/M, ..., 1}^d`.
///
/// Every `x` lies between grid corners `v <= x <= w` with
/// `λ([0,w)) - λ([0,v)) <= 1 - (1 - 1/M)^d`, the gap of the top cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    /// Bracketing gap actually achieved, `1 - (1 - 1/M)^d`.
    pub delta: f64,
    /// Grid resolution `M`.
    pub grid: u32,
    pub dim: usize,
}

impl CoverSpec {
    /// Gap `1 - (1 - 1/M)^d` of the equidistant grid.
    pub fn gap(grid: u32, dim: usize) -> f64 {
        let d = i32::try_from(dim).unwrap_or(i32::MAX);
        1.0 - (1.0 - 1.0 / grid as f64).powi(d)
    }

    pub fn from_grid(grid: u32, dim: usize) -> Result<Self> {
        if grid == 0 {
            return Err(Error::validation("cover grid resolution M must be >= 1"));
        }
        if dim == 0 {
            return Err(Error::validation("dimension must be >= 1"));
        }
        Ok(CoverSpec {
            delta: Self::gap(grid, dim),
            grid,
            dim,
        })
    }

    /// Coarsest grid whose gap is at most `delta`.
    pub fn from_delta(delta: f64, dim: usize) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::validation(format!("cover precision delta must be in (0, 1], got {delta}")));
        }
        if dim == 0 {
            return Err(Error::validation("dimension must be >= 1"));
        }
        // 1 - (1 - 1/M)^d <= delta  <=>  M >= 1 / (1 - (1 - delta)^{1/d})
        let denom = -f64::exp_m1(f64::ln_1p(-delta) / dim as f64);
        let guess = (1.0 / denom).ceil();
        if !(guess.is_finite() && guess <= u32::MAX as f64) {
            return Err(Error::validation(format!("delta {delta} needs an unrepresentable grid")));
        }
        let mut grid = (guess as u32).max(1);
        while grid > 1 && Self::gap(grid - 1, dim) <= delta {
            grid -= 1;
        }
        while Self::gap(grid, dim) > delta {
            grid += 1;
        }
        Self::from_grid(grid, dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{generate_jittered, StratifiedSpec};

    fn pts(points: &[&[f64]]) -> PointSet {
        PointSet::from_points(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn full_cube_boxes_have_zero_discrepancy() {
        for m in [2u32, 4, 8] {
            let spec = StratifiedSpec::full_grid(m, 2).unwrap();
            let p = generate_jittered(&spec, 3).unwrap();
            for a in 0..=m {
                for b in 0..=m {
                    let rect = AxisRect::anchored(vec![a as f64 / m as f64, b as f64 / m as f64]).unwrap();
                    assert_eq!(signed_disc_strict(&p, &rect).unwrap(), 0.0);
                }
            }
            // Non-anchored grid-aligned rectangle.
            let rect = AxisRect::new(vec![1.0 / m as f64, 0.0], vec![1.0, 1.0 - 1.0 / m as f64]).unwrap();
            assert_eq!(signed_disc_strict(&p, &rect).unwrap(), 0.0);
        }
    }

    #[test]
    fn grid_boxes_vanish_up_to_rounding_for_odd_m() {
        let spec = StratifiedSpec::full_grid(3, 3).unwrap();
        let p = generate_jittered(&spec, 5).unwrap();
        let rect = AxisRect::anchored(vec![1.0 / 3.0, 2.0 / 3.0, 1.0]).unwrap();
        assert!(signed_disc_strict(&p, &rect).unwrap().abs() <= 1e-12 * 27.0);
    }

    #[test]
    fn single_point_full_box() {
        let p = pts(&[&[0.5, 0.5]]);
        let rect = AxisRect::anchored(vec![1.0, 1.0]).unwrap();
        assert_eq!(signed_disc_strict(&p, &rect).unwrap(), 0.0);
    }

    #[test]
    fn two_points_half_interval() {
        let p = pts(&[&[0.25], &[0.75]]);
        let rect = AxisRect::anchored(vec![0.5]).unwrap();
        assert_eq!(signed_disc_strict(&p, &rect).unwrap(), 0.0);
    }

    #[test]
    fn closure_controls_upper_face() {
        let p = pts(&[&[0.5, 0.25]]);
        let rect = AxisRect::anchored(vec![0.5, 0.5]).unwrap();
        assert_eq!(signed_disc(&p, &rect, &[Closure::Strict, Closure::Strict]).unwrap(), -0.25);
        assert_eq!(signed_disc(&p, &rect, &[Closure::Closed, Closure::Strict]).unwrap(), 0.75);
        // Lower face is always closed.
        let rect = AxisRect::new(vec![0.5, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(signed_disc_strict(&p, &rect).unwrap(), 0.5);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = pts(&[&[0.5, 0.5]]);
        let rect = AxisRect::anchored(vec![0.5]).unwrap();
        assert!(matches!(signed_disc_strict(&p, &rect), Err(Error::Validation(_))));
    }

    #[test]
    fn invalid_rectangles_are_rejected() {
        assert!(AxisRect::new(vec![0.5], vec![0.4]).is_err());
        assert!(AxisRect::new(vec![0.0], vec![1.5]).is_err());
        assert!(AxisRect::new(vec![-0.1], vec![0.5]).is_err());
        assert!(AxisRect::new(vec![0.0, 0.0], vec![0.5]).is_err());
        assert!(AxisRect::new(vec![], vec![]).is_err());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalized(0.75, 1).unwrap(), 0.75);
        assert_eq!(normalized(7.0, 16).unwrap(), 0.4375);
        assert!((normalized(25.4, 243).unwrap() - 0.104_526_748_971_193_4).abs() < 1e-15);
        assert!(normalized(1.0, 0).is_err());
    }

    #[test]
    fn cover_from_delta_is_coarsest() {
        for d in [1usize, 2, 3, 5] {
            for delta in [0.5, 0.1, 0.03, 0.001] {
                let c = CoverSpec::from_delta(delta, d).unwrap();
                assert!(c.delta <= delta);
                if c.grid > 1 {
                    assert!(CoverSpec::gap(c.grid - 1, d) > delta);
                }
            }
        }
        assert_eq!(CoverSpec::from_grid(4, 2).unwrap().delta, 7.0 / 16.0);
        assert!(CoverSpec::from_delta(0.0, 2).is_err());
        assert!(CoverSpec::from_delta(1.5, 2).is_err());
    }
}
