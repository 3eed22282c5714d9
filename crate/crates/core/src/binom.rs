//! Bounds on the maximum of `k` independent `Bin(n, 1/2)` variables, and an
//! exact oracle for the quantities they bound.
//!
//! The constant `e^{169/6}` (about `1.7e12`) only ever enters through its
//! logarithm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

/// `ln(1.5) + 169/6 + ln(π)/2`: log of the denominator `1.5 e^{169/6} √π`.
pub fn ln_const_sqrt_pi() -> f64 {
    1.5f64.ln() + 169.0 / 6.0 + 0.5 * std::f64::consts::PI.ln()
}

/// `ln(1.5) + 169/6 + ln(2π)/2`: log of `1.5 e^{169/6} √(2π)`.
pub fn ln_const_sqrt_2pi() -> f64 {
    1.5f64.ln() + 169.0 / 6.0 + 0.5 * std::f64::consts::TAU.ln()
}

/// Largest trial count accepted by the exact oracles.
pub const MAX_ORACLE_TRIALS: u64 = 10_000;
/// Largest variable count accepted by the exact oracles.
pub const MAX_ORACLE_VARIABLES: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxBinParams {
    pub n: u64,
    pub k: u64,
    pub c: f64,
}

/// `α(c) = √( n (ln k - ½ ln ln k - c) / (2 (1 + √(2 ln k / n))) )`.
pub fn alpha(params: &MaxBinParams) -> Result<f64> {
    let MaxBinParams { n, k, c } = *params;
    if n == 0 {
        return Err(Error::Domain("alpha: n must be >= 1".into()));
    }
    if k < 2 {
        return Err(Error::Domain(format!("alpha: ln ln k is undefined for k = {k}")));
    }
    let n = n as f64;
    let lk = (k as f64).ln();
    let num = n * ((lk - 0.5 * lk.ln()) - c);
    if num < 0.0 {
        return Err(Error::Domain(format!(
            "alpha: negative radicand for c = {c} (need c <= ln k - ½ ln ln k)"
        )));
    }
    Ok((num / (2.0 * (1.0 + (2.0 * lk / n).sqrt()))).sqrt())
}

/// The two hypotheses of the probability bound, evaluated at `α(c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Applicability {
    pub alpha: f64,
    /// `α ≥ √n`
    pub alpha_at_least_sqrt_n: bool,
    /// `α + n/α ≤ n/2`
    pub capped: bool,
}

impl Applicability {
    pub fn holds(&self) -> bool {
        self.alpha_at_least_sqrt_n && self.capped
    }
}

pub fn applicability(params: &MaxBinParams) -> Result<Applicability> {
    let a = alpha(params)?;
    let n = params.n as f64;
    Ok(Applicability {
        alpha: a,
        alpha_at_least_sqrt_n: a >= n.sqrt(),
        capped: a > 0.0 && a + n / a <= n / 2.0,
    })
}

/// Lower bound `1 - exp(-e^c / (1.5 e^{169/6} √π))` on
/// `Pr[X_max ≥ n/2 + α(c)]`.
pub fn prob_bound(params: &MaxBinParams) -> Result<f64> {
    let app = applicability(params)?;
    if !app.alpha_at_least_sqrt_n {
        return Err(Error::Range(format!(
            "probability bound needs alpha(c) >= sqrt(n); alpha = {}, sqrt(n) = {}",
            app.alpha,
            (params.n as f64).sqrt()
        )));
    }
    if !app.capped {
        return Err(Error::Range(format!(
            "probability bound needs alpha(c) + n/alpha(c) <= n/2; alpha = {}, n = {}",
            app.alpha, params.n
        )));
    }
    Ok(-f64::exp_m1(-(params.c - ln_const_sqrt_pi()).exp()))
}

/// Lower bound on `E[max(0, X_max - n/2)]`, valid for `e^6 ≤ k ≤ e^{n/2}`.
pub fn expect_bound(n: u64, k: u64) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(Error::validation("expectation bound needs n, k >= 1"));
    }
    let lk = (k as f64).ln();
    if lk < 6.0 {
        return Err(Error::Range(format!("expectation bound needs k >= e^6 ≈ 403.43, got k = {k}")));
    }
    let nf = n as f64;
    if lk > nf / 2.0 {
        return Err(Error::Range(format!("expectation bound needs k <= e^(n/2), got k = {k}, n = {n}")));
    }
    let alpha_k = (nf * (lk - lk.ln()) / (2.0 * (1.0 + (2.0 * lk / nf).sqrt()))).sqrt();
    let factor = -f64::exp_m1(-(lk.sqrt().ln() - ln_const_sqrt_pi()).exp());
    Ok(alpha_k * factor)
}

/// Lower bound `e^{-1/6} (2π)^{-1/2} n^{-1/2} e^{-2α²/n - 4α³/n²}` on
/// `Pr[X = n/2 + α]`.
pub fn pointwise_pmf_bound(n: u64, alpha: f64) -> Result<f64> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::validation(format!("pointwise bound needs even n >= 2, got {n}")));
    }
    let nf = n as f64;
    if !(0.0..=nf / 2.0).contains(&alpha) || alpha.fract() != 0.0 {
        return Err(Error::validation(format!(
            "pointwise bound needs n/2 + alpha integral with 0 <= alpha <= n/2, got alpha = {alpha}"
        )));
    }
    let e = -1.0 / 6.0 - 0.5 * std::f64::consts::TAU.ln() - 0.5 * nf.ln() - 2.0 * alpha * alpha / nf
        - 4.0 * alpha.powi(3) / (nf * nf);
    Ok(e.exp())
}

/// The tail bound chain for `Pr[X ≥ n/2 + α]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// `e^{-1/6} (2π)^{-1/2} ⌊n/α⌋ n^{-1/2} e^{-2(α+n/α)²/n - 4(α+n/α)³/n²}`
    pub intermediate: f64,
    /// `(1.5 e^{169/6} √(2π))^{-1} (√n/α) e^{-2α²/n - 4α³/n²}`
    pub simplified: f64,
}

pub fn tail_bound_eq_bino(n: u64, alpha: f64) -> Result<TailBound> {
    let nf = n as f64;
    if n == 0 || !(alpha >= nf.sqrt()) {
        return Err(Error::Range(format!("tail bound needs alpha >= sqrt(n); alpha = {alpha}, n = {n}")));
    }
    if alpha + nf / alpha > nf / 2.0 {
        return Err(Error::Range(format!(
            "tail bound needs alpha + n/alpha <= n/2; alpha + n/alpha = {}, n/2 = {}",
            alpha + nf / alpha,
            nf / 2.0
        )));
    }
    let b = alpha + nf / alpha;
    let ln_pref = -1.0 / 6.0 - 0.5 * std::f64::consts::TAU.ln();
    let intermediate = (ln_pref + (nf / alpha).floor().ln() - 0.5 * nf.ln() - 2.0 * b * b / nf
        - 4.0 * b.powi(3) / (nf * nf))
        .exp();
    let simplified = (-ln_const_sqrt_2pi() + 0.5 * nf.ln() - alpha.ln() - 2.0 * alpha * alpha / nf
        - 4.0 * alpha.powi(3) / (nf * nf))
        .exp();
    Ok(TailBound {
        intermediate,
        simplified,
    })
}

fn check_oracle_n(n: u64) -> Result<()> {
    if n == 0 || n > MAX_ORACLE_TRIALS {
        return Err(Error::Range(format!("oracle needs 1 <= n <= {MAX_ORACLE_TRIALS}, got {n}")));
    }
    Ok(())
}

/// The `Bin(n, 1/2)` pmf on `0..=n`, by the ratio recurrence outward from
/// the mode followed by normalization.
pub fn binomial_pmf(n: u64) -> Result<Vec<f64>> {
    check_oracle_n(n)?;
    let n = n as usize;
    let mode = n / 2;
    let mut w = vec![0.0f64; n + 1];
    w[mode] = 1.0;
    for x in mode..n {
        w[x + 1] = w[x] * (n - x) as f64 / (x + 1) as f64;
    }
    for x in (1..=mode).rev() {
        w[x - 1] = w[x] * x as f64 / (n - x + 1) as f64;
    }
    let total = w.iter().copied().collect::<CompensatedSum>().value();
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Upper tails `S[x] = Pr[X ≥ x]` for `x` in `0..=n+1`, summed from the far
/// end so small tails keep full relative precision.
pub fn binomial_upper_tails(n: u64) -> Result<Vec<f64>> {
    let pmf = binomial_pmf(n)?;
    let mut tails = vec![0.0; pmf.len() + 1];
    let mut acc = CompensatedSum::new();
    for x in (0..pmf.len()).rev() {
        acc.add(pmf[x]);
        tails[x] = acc.value();
    }
    Ok(tails)
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 || k > MAX_ORACLE_VARIABLES {
        return Err(Error::Range(format!("oracle needs 1 <= k <= {MAX_ORACLE_VARIABLES}, got {k}")));
    }
    Ok(())
}

/// `1 - (1 - s)^k` in log domain.
fn max_tail(s: f64, k: u64) -> f64 {
    if s >= 1.0 {
        return 1.0;
    }
    -f64::exp_m1(k as f64 * f64::ln_1p(-s))
}

/// Exact `Pr[X_max ≥ threshold]`.
pub fn exact_max_prob(n: u64, k: u64, threshold: f64) -> Result<f64> {
    check_k(k)?;
    let tails = binomial_upper_tails(n)?;
    let x = threshold.ceil().max(0.0);
    if x > n as f64 {
        return Ok(0.0);
    }
    Ok(max_tail(tails[x as usize], k))
}

/// Exact `E[max(0, X_max - n/2)]`:
/// `(x0 - n/2)·Pr[X_max ≥ x0] + Σ_{x > x0} Pr[X_max ≥ x]` with
/// `x0 = ⌊n/2⌋ + 1`.
pub fn exact_max_binomial_expect(n: u64, k: u64) -> Result<f64> {
    check_k(k)?;
    let tails = binomial_upper_tails(n)?;
    let x0 = (n / 2 + 1) as usize;
    let mut acc = CompensatedSum::new();
    for x in (x0 + 1..=n as usize).rev() {
        acc.add(max_tail(tails[x], k));
    }
    acc.add((x0 as f64 - n as f64 / 2.0) * max_tail(tails[x0], k));
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64, k: u64, c: f64) -> MaxBinParams {
        MaxBinParams { n, k, c }
    }

    #[test]
    fn alpha_zero_radicand() {
        let k = 500u64;
        let lk = (k as f64).ln();
        let c = lk - 0.5 * lk.ln();
        assert_eq!(alpha(&p(200, k, c)).unwrap(), 0.0);
        assert!(matches!(alpha(&p(200, k, c + 1e-6)), Err(Error::Domain(_))));
        assert!(matches!(alpha(&p(200, 1, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn alpha_decreasing_in_c() {
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let a = alpha(&p(200, 500, -10.0 + 0.2 * i as f64)).unwrap();
            assert!(a < prev);
            prev = a;
        }
    }

    #[test]
    fn prob_bound_limits_and_rejection() {
        // Very negative c with a huge n keeps alpha applicable.
        let v = prob_bound(&p(100_000, 500, -40.0));
        assert!(matches!(v, Err(Error::Range(_))) || v.unwrap() < 1e-20);
        for c in [-5.0, 0.0, 2.0] {
            let err = prob_bound(&p(10, 500, c)).unwrap_err();
            assert!(matches!(err, Error::Range(_)));
        }
        let b = prob_bound(&p(200, 500, 0.5 * (500f64).ln().ln())).unwrap();
        assert!(b > 0.0 && b < 1e-11);
    }

    #[test]
    fn expect_bound_ranges() {
        assert!(expect_bound(20, 404).is_ok());
        let e = expect_bound(20, 100).unwrap_err();
        assert!(e.to_string().contains("e^6"));
        assert!(expect_bound(20, 1_000_000).unwrap_err().to_string().contains("e^(n/2)"));
    }

    #[test]
    fn pointwise_bound_validation() {
        assert!(pointwise_pmf_bound(11, 0.0).is_err());
        assert!(pointwise_pmf_bound(10, 0.5).is_err());
        assert!(pointwise_pmf_bound(10, 6.0).is_err());
        assert!(pointwise_pmf_bound(10, 5.0).unwrap() < 2f64.powi(-10));
    }

    #[test]
    fn tail_bound_chain() {
        assert!(tail_bound_eq_bino(16, 8.0).is_err());
        let t = tail_bound_eq_bino(400, 20.0).unwrap();
        assert!(t.simplified <= t.intermediate);
    }

    #[test]
    fn oracle_hand_cases() {
        assert!((exact_max_binomial_expect(1, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((exact_max_binomial_expect(2, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((exact_max_binomial_expect(2, 2).unwrap() - 7.0 / 16.0).abs() < 1e-16);
        assert!(exact_max_binomial_expect(0, 1).is_err());
        assert!(exact_max_binomial_expect(10, 0).is_err());
    }

    #[test]
    fn oracle_single_variable_matches_direct_sum() {
        for n in [1u64, 2, 7, 20, 101, 400] {
            let pmf = binomial_pmf(n).unwrap();
            let direct: CompensatedSum = pmf
                .iter()
                .enumerate()
                .map(|(x, &q)| (x as f64 - n as f64 / 2.0).max(0.0) * q)
                .collect();
            let e = exact_max_binomial_expect(n, 1).unwrap();
            assert!((e - direct.value()).abs() <= 1e-10 * direct.value());
        }
    }

    #[test]
    fn oracle_monotone_in_k() {
        for n in [20u64, 100, 401] {
            let mut prev = 0.0;
            for k in [1u64, 2, 10, 404, 1000, 10_000, 1_000_000] {
                let e = exact_max_binomial_expect(n, k).unwrap();
                assert!(e >= prev);
                prev = e;
            }
        }
    }

    #[test]
    fn pmf_sums_to_one_and_is_symmetric() {
        let pmf = binomial_pmf(2000).unwrap();
        let s: CompensatedSum = pmf.iter().copied().collect();
        assert!((s.value() - 1.0).abs() < 1e-14);
        for x in 0..=2000 {
            let (a, b) = (pmf[x], pmf[2000 - x]);
            if a.max(b) > 1e-290 {
                assert!((a - b).abs() <= 1e-12 * a.max(b));
            }
        }
    }
}
