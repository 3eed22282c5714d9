//! Closed forms re-evaluated in 256-bit arithmetic, and binomial
//! probabilities from exact integer arithmetic.

use astro_float::{expr, BigFloat, Consts, RoundingMode};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use jitterdisc::binom::{self, MaxBinParams};
use jitterdisc::bounds::{lower_main_bound, smallm_lower_bound, upper_thm_bound, UpperConstant};

const P: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

fn f64_of(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap()
}

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, P)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn alpha_twelve_digits() {
    let mut cc = Consts::new().unwrap();
    for (n, k, c) in [(200u64, 500u64, 0.0), (1000, 10_000, -1.5), (50, 404, 0.25), (2000, 1_000_000, 2.0)] {
        let (nb, kb, cb) = (bf(n as f64), bf(k as f64), bf(c));
        let want = expr!(
            sqrt(nb * (ln(kb) - 0.5 * ln(ln(kb)) - cb) / (2 * (1 + sqrt(2 * ln(kb) / nb)))),
            (P, RM, &mut cc)
        );
        let got = binom::alpha(&MaxBinParams { n, k, c }).unwrap();
        assert!(rel(got, f64_of(&want)) < 1e-12, "n={n} k={k} c={c}: {got} vs {want}");
    }
}

#[test]
fn prob_and_expect_bounds_match_high_precision() {
    let mut cc = Consts::new().unwrap();
    let konst = expr!(1.5 * exp(169 / 6) * sqrt(pi), (P, RM, &mut cc));
    for c in [-3.0, 0.0, 2.5] {
        let cb = bf(c);
        let want = expr!(1 - exp(-exp(cb) / konst), (P, RM, &mut cc));
        let got = binom::prob_bound(&MaxBinParams { n: 2000, k: 10_000, c }).unwrap();
        assert!(rel(got, f64_of(&want)) < 1e-12, "c={c}: {got} vs {want}");
    }
    for (n, k) in [(20u64, 404u64), (2000, 10_000), (400, 1000)] {
        let (nb, kb) = (bf(n as f64), bf(k as f64));
        let want = expr!(
            sqrt(nb * (ln(kb) - ln(ln(kb))) / (2 * (1 + sqrt(2 * ln(kb) / nb))))
                * (1 - exp(-sqrt(ln(kb)) / konst)),
            (P, RM, &mut cc)
        );
        let got = binom::expect_bound(n, k).unwrap();
        assert!(rel(got, f64_of(&want)) < 1e-10, "n={n} k={k}: {got} vs {want}");
    }
}

#[test]
fn bounds_ten_digits_on_grid() {
    let mut cc = Consts::new().unwrap();
    let ms = [2u64, 3, 5, 8, 17, 64, 100, 808, 1000, 4096];
    for d in 2u64..=10 {
        for &m in &ms {
            let (mb, db) = (bf(m as f64), bf(d as f64));
            let got = smallm_lower_bound(m, d).unwrap().value;
            let x = expr!(pow(mb - 1, (db - 1) / 2), (P, RM, &mut cc));
            let want = expr!(
                4 / (5 * exp(8 + 1 / 6) * sqrt(2 * pi)) * exp(-32 / x) * db * x,
                (P, RM, &mut cc)
            );
            assert!(rel(got, f64_of(&want)) < 1e-10, "smallm m={m} d={d}: {got} vs {want}");

            if m >= d {
                let got = upper_thm_bound(m, d, UpperConstant::Statement).unwrap().value;
                let want = expr!(
                    60.9984 * sqrt(db * pow(mb, db)) * (sqrt(ln(4 * exp(1) * mb / db)) + 2.9599) / sqrt(mb / db),
                    (P, RM, &mut cc)
                );
                assert!(rel(got, f64_of(&want)) < 1e-10, "upper m={m} d={d}: {got} vs {want}");
            }

            let k = m / d;
            if k >= 2 {
                let got = lower_main_bound(m, d).unwrap().value;
                let kb = bf(k as f64);
                let want = expr!(
                    pow(2 * exp(1), -0.5)
                        * db
                        * pow(mb, (db - 1) / 2)
                        * sqrt(ln(kb) - ln(ln(kb)))
                        * pow(1 + sqrt(2 * ln(kb) / pow(mb - kb, db - 1)), -0.5)
                        * (1 - exp(-sqrt(ln(kb)) / (1.5 * exp(169 / 6) * sqrt(pi)))),
                    (P, RM, &mut cc)
                );
                assert!(rel(got, f64_of(&want)) < 1e-10, "lower m={m} d={d}: {got} vs {want}");
            }
        }
    }
}

fn choose(n: u64, k: u64) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

fn ratio(num: &BigUint, n: u64) -> f64 {
    // num / 2^n without overflowing f64 in the numerator
    let shift = num.bits().saturating_sub(60);
    (num >> shift).to_f64().unwrap() * 2f64.powi(shift as i32 - n as i32)
}

#[test]
fn pmf_matches_exact_rationals() {
    for n in [1u64, 2, 7, 20, 64, 100] {
        let pmf = binom::binomial_pmf(n).unwrap();
        let tails = binom::binomial_upper_tails(n).unwrap();
        let mut tail = BigUint::default();
        for x in (0..=n).rev() {
            let c = choose(n, x);
            tail += &c;
            assert!(rel(pmf[x as usize], ratio(&c, n)) < 1e-13, "pmf n={n} x={x}");
            assert!(rel(tails[x as usize], ratio(&tail, n)) < 1e-13, "tail n={n} x={x}");
        }
    }
}

#[test]
fn pointwise_bound_below_exact_pmf() {
    for n in [10u64, 50, 100, 500] {
        for a in 0..=n / 2 {
            let exact = ratio(&choose(n, n / 2 + a), n);
            let b = binom::pointwise_pmf_bound(n, a as f64).unwrap();
            assert!(b <= exact, "n={n} alpha={a}: {b} > {exact}");
        }
    }
}

#[test]
fn max_expectation_hand_values_and_direct_sum() {
    assert!((binom::exact_max_binomial_expect(1, 1).unwrap() - 0.25).abs() < 1e-15);
    assert!((binom::exact_max_binomial_expect(2, 1).unwrap() - 0.25).abs() < 1e-15);
    assert!((binom::exact_max_binomial_expect(2, 2).unwrap() - 7.0 / 16.0).abs() < 1e-15);
    for n in [5u64, 20, 63, 100] {
        let direct: f64 = (0..=n)
            .filter(|&x| 2 * x > n)
            .map(|x| (x as f64 - n as f64 / 2.0) * ratio(&choose(n, x), n))
            .sum();
        let got = binom::exact_max_binomial_expect(n, 1).unwrap();
        assert!((got - direct).abs() < 1e-10, "n={n}: {got} vs {direct}");
    }
}
