//! Koksma–Hlawka check on the test integrand `f(x) = ∏ x_i`.
//!
//! `∫ f = 2^{-d}`.
//!
//! Hardy–Krause variation, anchored at `1` (the anchoring that pairs with
//! the star discrepancy of boxes `[0, x)`):
//! `V_HK(f) = Σ_{∅ ≠ u ⊆ [d]} V_Vitali(f_u)`, where `f_u` is `f` on the face
//! `{x : x_j = 1 for j ∉ u}`, i.e. `f_u(x_u) = ∏_{i ∈ u} x_i`. The mixed
//! derivative `∂^u f_u = 1`, so `V_Vitali(f_u) = ∫_{[0,1]^u} 1 = 1`. Hence
//! `V_HK(f) = 2^d - 1` (`1` for `d = 1`, `3` for `d = 2`).

use serde::{Deserialize, Serialize};

use crate::discrepancy::{star_disc_certified_upper, star_disc_exact, CoverSpec, DiscKind};
use crate::error::{Error, Result};
use crate::sampler::PointSet;
use crate::stats::CompensatedSum;

/// Cover precision used when the exact value is out of budget.
const FALLBACK_DELTA: f64 = 1e-3;

/// `V_HK(∏ x_i) = 2^d - 1`.
pub fn product_variation(d: usize) -> Result<f64> {
    if d == 0 || d > 1000 {
        return Err(Error::validation(format!("dimension must be in [1, 1000], got {d}")));
    }
    Ok(2f64.powi(d as i32) - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhReport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub estimate: f64,
    pub integral: f64,
    pub error: f64,
    /// `D*/N`, exact or a certified upper bound.
    pub disc_normalized: f64,
    pub disc_kind: DiscKind,
    pub variation: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares the quadrature error of `f = ∏ x_i` on `p` with `(D*/N)·V_HK(f)`.
pub fn kh_demo(p: &PointSet) -> Result<KhReport> {
    let d = p.dim();
    let n = p.len();
    let variation = product_variation(d)?;
    let sum: CompensatedSum = p.points().map(|q| q.iter().product::<f64>()).collect();
    let estimate = sum.value() / n as f64;
    let integral = 2f64.powi(-(d as i32));
    let est = match star_disc_exact(p) {
        Ok(e) => e,
        Err(Error::Infeasible { .. }) => star_disc_certified_upper(p, &CoverSpec::from_delta(FALLBACK_DELTA, d)?)?,
        Err(e) => return Err(e),
    };
    let disc_normalized = est.value / n as f64;
    let error = (estimate - integral).abs();
    let bound = disc_normalized * variation;
    Ok(KhReport {
        d,
        n,
        estimate,
        integral,
        error,
        disc_normalized,
        disc_kind: est.kind,
        variation,
        bound,
        holds: error <= bound + 1e-12,
    })
}
