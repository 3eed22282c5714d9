//! Closed-form bounds on the expected star discrepancy of jittered sampling,
//! evaluated in log domain.
//!
//! `ln` is the natural logarithm throughout.

use serde::{Deserialize, Serialize};

use crate::binom::ln_const_sqrt_pi;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFormula {
    LowerMain,
    SmallMLower,
    UpperThm,
    McReference,
}

impl std::fmt::Display for BoundFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundFormula::LowerMain => "lower_main",
            BoundFormula::SmallMLower => "smallm_lower",
            BoundFormula::UpperThm => "upper_thm",
            BoundFormula::McReference => "mc_reference",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub formula: BoundFormula,
    pub applicable: bool,
    /// Why the formula's hypotheses fail, when they do.
    pub reason: Option<String>,
}

impl BoundValue {
    fn new(value: f64, formula: BoundFormula, reason: Option<String>) -> Self {
        BoundValue {
            value,
            formula,
            applicable: reason.is_none(),
            reason,
        }
    }
}

/// Leading constant of the upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperConstant {
    /// 60.9984, as stated with the theorem.
    #[default]
    Statement,
    /// 60.9948, the last line of the proof.
    Proof,
}

impl UpperConstant {
    pub fn value(self) -> f64 {
        match self {
            UpperConstant::Statement => 60.9984,
            UpperConstant::Proof => 60.9948,
        }
    }
}

fn check_md(m: u64, d: u64) -> Result<()> {
    if m < 2 || d < 2 {
        return Err(Error::validation(format!("need m, d >= 2, got m = {m}, d = {d}")));
    }
    Ok(())
}

/// `(2e)^{-1/2} d m^{(d-1)/2} √(ln k - ln ln k) (1 + √(2 ln k / (m-k)^{d-1}))^{-1/2}
/// (1 - exp(-√(ln k) / (1.5 e^{169/6} √π)))` with `k = ⌊m/d⌋`; applicable
/// when `k ≥ e^6`.
pub fn lower_main_bound(m: u64, d: u64) -> Result<BoundValue> {
    check_md(m, d)?;
    let k = m / d;
    if k <= 1 {
        return Err(Error::Domain(format!("ln ln ⌊m/d⌋ is undefined for ⌊m/d⌋ = {k}")));
    }
    let (mf, df, kf) = (m as f64, d as f64, k as f64);
    let lk = kf.ln();
    let spread = lk - lk.ln();
    if spread <= 0.0 {
        return Err(Error::Domain(format!("ln k - ln ln k <= 0 for k = {k}")));
    }
    let root = (0.5 * ((2.0 * lk).ln() - (df - 1.0) * (mf - kf).ln())).exp();
    let factor3 = -f64::exp_m1(-(lk.sqrt().ln() - ln_const_sqrt_pi()).exp());
    let ln_value = -0.5 * (2.0f64.ln() + 1.0) + df.ln() + 0.5 * (df - 1.0) * mf.ln() + 0.5 * spread.ln()
        - 0.5 * root.ln_1p()
        + factor3.ln();
    let reason = (lk < 6.0).then(|| format!("⌊m/d⌋ = {k} < e^6 ≈ 403.43"));
    Ok(BoundValue::new(ln_value.exp(), BoundFormula::LowerMain, reason))
}

/// `4/(5 e^{8+1/6} √(2π)) exp(-32/(m-1)^{(d-1)/2}) d (m-1)^{(d-1)/2}`.
pub fn smallm_lower_bound(m: u64, d: u64) -> Result<BoundValue> {
    check_md(m, d)?;
    let (mf, df) = (m as f64, d as f64);
    let ln_x = 0.5 * (df - 1.0) * (mf - 1.0).ln();
    let ln_c = 4.0f64.ln() - 5.0f64.ln() - (8.0 + 1.0 / 6.0) - 0.5 * std::f64::consts::TAU.ln();
    let ln_value = ln_c - 32.0 * (-ln_x).exp() + df.ln() + ln_x;
    Ok(BoundValue::new(ln_value.exp(), BoundFormula::SmallMLower, None))
}

/// `C √(d m^d) (√(ln(4em/d)) + 2.9599) / √(m/d)`; applicable when `m ≥ d ≥ 2`.
pub fn upper_thm_bound(m: u64, d: u64, constant: UpperConstant) -> Result<BoundValue> {
    if m < 1 || d < 1 {
        return Err(Error::validation(format!("need m, d >= 1, got m = {m}, d = {d}")));
    }
    let (mf, df) = (m as f64, d as f64);
    let ln_value = constant.value().ln() + 0.5 * (df.ln() + df * mf.ln())
        + ((4.0 * std::f64::consts::E * mf / df).ln().sqrt() + 2.9599).ln()
        - 0.5 * (mf.ln() - df.ln());
    let reason = if d < 2 {
        Some(format!("d = {d} < 2"))
    } else if m < d {
        Some(format!("m = {m} < d = {d}"))
    } else {
        None
    };
    Ok(BoundValue::new(ln_value.exp(), BoundFormula::UpperThm, reason))
}

/// `multiplier · √(d n)`, the order of the expected discrepancy of `n`
/// independent uniform points.
pub fn mc_reference(n: u64, d: u64, multiplier: f64) -> Result<BoundValue> {
    if n < 1 || d < 1 {
        return Err(Error::validation(format!("need n, d >= 1, got n = {n}, d = {d}")));
    }
    if !(multiplier >= 0.0 && multiplier.is_finite()) {
        return Err(Error::validation(format!("multiplier must be finite and >= 0, got {multiplier}")));
    }
    Ok(BoundValue::new(
        multiplier * (d as f64 * n as f64).sqrt(),
        BoundFormula::McReference,
        None,
    ))
}

/// The jittered-sampling rate `d m^{(d-1)/2} √(1 + ln(m/d))`.
pub fn collapse_rate(m: u64, d: u64) -> f64 {
    let (mf, df) = (m as f64, d as f64);
    df * mf.powf(0.5 * (df - 1.0)) * (1.0 + (mf / df).ln()).sqrt()
}

/// All four formulas at `(m, d)` with `n = m^d`; `lower_main` is omitted when
/// `⌊m/d⌋ <= 1`.
pub fn all_bounds(m: u64, d: u64, constant: UpperConstant) -> Result<Vec<BoundValue>> {
    check_md(m, d)?;
    let mut out = Vec::with_capacity(4);
    if let Ok(b) = lower_main_bound(m, d) {
        out.push(b);
    }
    out.push(smallm_lower_bound(m, d)?);
    out.push(upper_thm_bound(m, d, constant)?);
    let n = (m as f64).powf(d as f64);
    out.push(BoundValue::new(
        (d as f64 * n).sqrt(),
        BoundFormula::McReference,
        None,
    ));
    Ok(out)
}
