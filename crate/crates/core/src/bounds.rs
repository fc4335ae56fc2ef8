//! Closed-form envelopes, regime hypotheses and counting bounds.
//!
//! Every asymptotic constant is a named entry of [`BoundConstants`] defaulting
//! to 1.0, so envelope values are only meaningful up to that constant.

use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::{primes, Error, Result};

pub const DIVISOR_SUM_LIMIT: u64 = 100_000_000;

/// Named constants for the envelopes and regime checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConstants {
    pub c_cyc: f64,
    pub c_inv: f64,
    pub c_noncyc: f64,
    /// Constant in `lambda_m`; see [`crate::mahler::C_DEFAULT`].
    pub c_dob: f64,
    /// Lower-end constant of the `K >= c d` regime.
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c_cyc: 1.0,
            c_inv: 1.0,
            c_noncyc: 1.0,
            c_dob: crate::mahler::C_DEFAULT,
            c: 1.0,
            c1: 1.0,
            c2: 1.0,
        }
    }
}

impl BoundConstants {
    /// `b = exp(e^(1 / cbrt(4 c1)) / 2)`.
    pub fn b(&self) -> f64 {
        ((1.0 / (4.0 * self.c1).cbrt()).exp() / 2.0).exp()
    }
}

/// `sqrt(d) / (log d)^2`.
pub fn m0(d: u64) -> f64 {
    let l = (d as f64).ln();
    (d as f64).sqrt() / (l * l)
}

/// `sqrt(d) / (log(K d))^2`.
pub fn m1(d: u64, k: u64) -> f64 {
    let l = (k as f64 * d as f64).ln();
    (d as f64).sqrt() / (l * l)
}

/// Integer degree cap used by detectors for a real threshold: `max(1, floor(m))`.
pub fn detector_degree(m: f64) -> u64 {
    (m.floor() as u64).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundContext {
    pub d: u64,
    pub k: u64,
    pub a: Option<u32>,
    pub constants: BoundConstants,
    pub m0: f64,
    pub m1: f64,
}

impl BoundContext {
    pub fn new(d: u64, k: u64, a: Option<u32>, constants: BoundConstants) -> Self {
        Self {
            d,
            k,
            a,
            constants,
            m0: m0(d),
            m1: m1(d, k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    SqrtKd,
    InvK,
    Noncyc,
}

/// Envelope value, up to its constant: `C sqrt(K/d)`, `C/K` or
/// `(2K+1)^(-C d / (log d)^4)`.
pub fn envelope(d: u64, k: u64, which: Envelope, constants: &BoundConstants) -> f64 {
    let (d, k) = (d as f64, k as f64);
    match which {
        Envelope::SqrtKd => constants.c_cyc * (k / d).sqrt(),
        Envelope::InvK => constants.c_inv / k,
        Envelope::Noncyc => (2.0 * k + 1.0).powf(-constants.c_noncyc * d / d.ln().powi(4)),
    }
}

/// Hypothesis flags for each regime at `(d, K)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    /// Smallest natural `a > 1` with `K <= d^(a-1)`.
    pub min_a: u32,
    /// `K <= d^(a-1)` for the supplied `a` (or `min_a`).
    pub main_part1: bool,
    /// `c d <= K <= d^(a-1)`.
    pub main_part2: bool,
    /// `K <= e^(d^0.25) / d`.
    pub main2_part1: bool,
    /// `c2 d <= K <= e^(d^0.25 / b) / d`.
    pub main2_part2: bool,
    pub b: f64,
    /// `log2 K - log2(1 + (log K)^2)`, the degree limit in the statement.
    pub hilbert_statement_limit: f64,
    pub hilbert_statement: bool,
    /// `log2 K - log2(1 + log K)`, the degree scale in the proof.
    pub hilbert_proof_limit: f64,
    pub hilbert_proof: bool,
    /// Noncyclotomic envelope against `min(sqrt(K/d), 1/K)`.
    pub noncyc: f64,
    pub noncyc_dominated: bool,
}

fn min_a(d: u64, k: u64) -> u32 {
    let mut a = 2u32;
    let mut power = d as u128;
    while power < k as u128 {
        power = power.saturating_mul(d as u128);
        a += 1;
    }
    a
}

fn below_power(d: u64, k: u64, a: u32) -> bool {
    let mut power = 1u128;
    for _ in 1..a {
        power = power.saturating_mul(d as u128);
    }
    (k as u128) <= power
}

pub fn regime_check(d: u64, k: u64, a: Option<u32>, constants: &BoundConstants) -> RegimeReport {
    let min_a = min_a(d, k);
    let a = a.unwrap_or(min_a);
    let (df, kf) = (d as f64, k as f64);
    let part1 = below_power(d, k, a);
    let b = constants.b();
    let quarter = df.powf(0.25);
    let lk = kf.ln();
    let hilbert_statement_limit = kf.log2() - (1.0 + lk * lk).log2();
    let hilbert_proof_limit = kf.log2() - (1.0 + lk).log2();
    let noncyc = envelope(d, k, Envelope::Noncyc, constants);
    let dominating = envelope(d, k, Envelope::SqrtKd, constants)
        .min(envelope(d, k, Envelope::InvK, constants));
    RegimeReport {
        min_a,
        main_part1: part1,
        main_part2: part1 && constants.c * df <= kf,
        main2_part1: kf <= quarter.exp() / df,
        main2_part2: constants.c2 * df <= kf && kf <= (quarter / b).exp() / df,
        b,
        hilbert_statement_limit,
        hilbert_statement: df <= hilbert_statement_limit,
        hilbert_proof_limit,
        hilbert_proof: df <= hilbert_proof_limit,
        noncyc,
        noncyc_dominated: noncyc <= dominating,
    }
}

/// Exact `sum_{k<=K} tau(k)` alongside the main term `K log K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivisorSum {
    pub sum: u64,
    pub main_term: f64,
}

/// `sum_{k<=K} tau(k) = sum_{j<=K} floor(K/j)`, evaluated by the hyperbola
/// identity `2 sum_{j<=s} floor(K/j) - s^2` with `s = floor(sqrt K)`.
pub fn divisor_sum(k: u64) -> Result<DivisorSum> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    if k > DIVISOR_SUM_LIMIT {
        return Err(Error::SizeExceeded {
            what: "K",
            value: k as f64,
            limit: DIVISOR_SUM_LIMIT as f64,
        });
    }
    let s = k.isqrt();
    let head: u64 = (1..=s).map(|j| k / j).sum();
    Ok(DivisorSum {
        sum: 2 * head - s * s,
        main_term: k as f64 * (k as f64).ln(),
    })
}

/// Smallest prime in `[2K+1, 4K]`.
pub fn bertrand_prime(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    let (lo, hi) = (2 * k + 1, 4 * k);
    (lo..=hi)
        .find(|&n| primes::is_prime(n))
        .ok_or(Error::WindowEmpty { lo, hi })
}

/// `(4K)^(d-2) (4K + 4 sum_{k<=K} tau(k))`.
pub fn hilbert_count_bound(d: u64, k: u64) -> Result<BigUint> {
    if d < 2 || k == 0 {
        return Err(Error::InvalidInput("need d >= 2 and K >= 1".into()));
    }
    let tau = divisor_sum(k)?.sum;
    let head = BigUint::from(4 * k).pow(d as u32 - 2);
    Ok(head * BigUint::from(4 * k + 4 * tau))
}

/// The count bound multiplied by the `d - 1` possible factor-degree splits.
pub fn hilbert_count_bound_inflated(d: u64, k: u64) -> Result<BigUint> {
    Ok(hilbert_count_bound(d, k)? * BigUint::from(d - 1))
}

/// `2 exp(-2 t^2 / n)`: two-sided tail bound for a sum of `n` fair bits
/// deviating from `n/2` by at least `t`.
pub fn hoeffding_bound(n: f64, t: f64) -> f64 {
    2.0 * (-2.0 * t * t / n).exp()
}

/// `2 exp(-2 * 4^d / d)`, the tail expression quoted for centered binomial
/// coefficients with `n = 4^(2d)` at threshold `4^d`. It is not a valid bound:
/// see [`hoeffding_bound`] with `n = 16^d`, `t = 4^d`, which equals `2 e^-2`.
pub fn centered_binomial_tail_as_quoted(d: u32) -> f64 {
    2.0 * (-2.0 * 4f64.powi(d as i32) / d as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau_oracle(k: u64) -> u64 {
        (1..=k).map(|n| (1..=n).filter(|j| n % j == 0).count() as u64).sum()
    }

    #[test]
    fn envelope_examples() {
        let c = BoundConstants::default();
        assert!((envelope(100, 1, Envelope::SqrtKd, &c) - 0.1).abs() < 1e-15);
        assert!((envelope(100, 100, Envelope::InvK, &c) - 0.01).abs() < 1e-15);
        let v = envelope(55, 1, Envelope::Noncyc, &c);
        let expect = 3f64.powf(-55.0 / 55f64.ln().powi(4));
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.79).abs() < 0.01);
    }

    #[test]
    fn regime_examples() {
        let c = BoundConstants::default();
        let r = regime_check(100, 1_000_000, None, &c);
        assert!((r.hilbert_statement_limit - 12.34).abs() < 0.01);
        assert!(!r.hilbert_statement);
        assert!(regime_check(50, 50, None, &c).main_part2);
        for d in 2..200 {
            assert!(!regime_check(d, 1, None, &c).main_part2);
        }
        assert_eq!(regime_check(10, 1000, None, &c).min_a, 4);
        assert!(!regime_check(10, 1000, Some(3), &c).main_part1);
        assert!((c.b() - 2.557).abs() < 1e-3);
    }

    #[test]
    fn m1_never_exceeds_m0() {
        for d in 2..500 {
            for k in [1, 2, 3, 10, 100, 10_000, 1_000_000] {
                assert!(m1(d, k) <= m0(d) + 1e-15, "d={d} K={k}");
            }
        }
        assert_eq!(detector_degree(0.47), 1);
        assert_eq!(detector_degree(3.9), 3);
    }

    #[test]
    fn divisor_sum_examples() {
        assert_eq!(divisor_sum(1).unwrap(), DivisorSum { sum: 1, main_term: 0.0 });
        let d10 = divisor_sum(10).unwrap();
        assert_eq!(d10.sum, 27);
        assert!((d10.main_term - 23.03).abs() < 0.01);
        let d100 = divisor_sum(100).unwrap();
        assert_eq!(d100.sum, 482);
        assert!((d100.main_term - 460.5).abs() < 0.1);
        assert!(divisor_sum(DIVISOR_SUM_LIMIT + 1).is_err());
    }

    #[test]
    fn divisor_sum_matches_oracle() {
        let mut running = 0;
        for k in 1..=2000u64 {
            running += (1..=k).filter(|j| k % j == 0).count() as u64;
            assert_eq!(divisor_sum(k).unwrap().sum, running, "K={k}");
        }
        assert_eq!(divisor_sum(300).unwrap().sum, tau_oracle(300));
    }

    #[test]
    fn divisor_sum_error_term() {
        for k in (10..=1_000_000u64).step_by(997) {
            let s = divisor_sum(k).unwrap();
            assert!((s.sum as f64 - s.main_term).abs() <= 2.0 * k as f64, "K={k}");
        }
    }

    #[test]
    fn bertrand_examples() {
        assert_eq!(bertrand_prime(1).unwrap(), 3);
        assert_eq!(bertrand_prime(3).unwrap(), 7);
        assert_eq!(bertrand_prime(15).unwrap(), 31);
        for k in (1..=1_000_000u64).step_by(101) {
            let p = bertrand_prime(k).unwrap();
            assert!(2 * k < p && p <= 4 * k);
        }
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_count_bound(2, 2).unwrap(), BigUint::from(20u32));
        assert_eq!(hilbert_count_bound(2, 1).unwrap(), BigUint::from(8u32));
        assert_eq!(hilbert_count_bound(3, 1).unwrap(), BigUint::from(32u32));
        assert_eq!(hilbert_count_bound_inflated(3, 1).unwrap(), BigUint::from(64u32));
    }

    #[test]
    fn quoted_tail_is_far_below_hoeffding() {
        assert!(centered_binomial_tail_as_quoted(1) < 1e-3);
        assert!((hoeffding_bound(16.0, 4.0) - 2.0 * (-2f64).exp()).abs() < 1e-15);
    }
}
