//! Anti-concentration for sums of independent uniform coefficients.
//!
//! Exact laws of sums are held as integer counts over a shared power
//! denominator `(2K+1)^m`, so convolution never leaves integer arithmetic.
//! The numeric pieces (characteristic function, the integral bound on point
//! masses, the cosine-power integral) sit next to their exact counterparts so
//! both sides of every comparison are available.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::{Error, Result};

/// Memory guard for exact sum laws: `K * m` may not exceed this.
pub const SUM_LAW_LIMIT: u64 = 10_000_000;
/// Brute-force guard for the cosine-power integral: `K^l * 2^l`.
pub const LEMMA21_LIMIT: u64 = 100_000_000;
pub const GRID_TOLERANCE: f64 = 1e-12;
pub const MIN_GRID: usize = 1024;
pub const MIN_QUAD_POINTS: usize = 2048;
const QUAD_CAP: usize = 1 << 20;
const QUAD_TARGET: f64 = 1e-10;

/// Law of an integer random variable with masses `numerators[i] / base^exponent`
/// at `offset + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    offset: i64,
    numerators: Vec<BigUint>,
    base: u64,
    exponent: u32,
}

impl ExactDistribution {
    /// Uniform law on `[-K, K]`.
    pub fn uniform(k: u64) -> Self {
        Self {
            offset: -(k as i64),
            numerators: vec![BigUint::one(); 2 * k as usize + 1],
            base: 2 * k + 1,
            exponent: 1,
        }
    }

    /// Law of `X + A` with `A` uniform on `[-K, K]` independent of `X`, where
    /// `2K + 1` must equal the denominator base.
    pub fn convolve_uniform(&self, k: u64) -> Self {
        assert_eq!(self.base, 2 * k + 1, "denominator base must be 2K+1");
        Self {
            offset: self.offset - k as i64,
            numerators: box_convolve(&self.numerators, k as usize),
            base: self.base,
            exponent: self.exponent + 1,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::from(self.base).pow(self.exponent)
    }

    pub fn denominator_parts(&self) -> (u64, u32) {
        (self.base, self.exponent)
    }

    /// Smallest and largest support points.
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.numerators.len() as i64 - 1)
    }

    pub fn numerator_at(&self, x: i64) -> BigUint {
        let i = x - self.offset;
        if i < 0 {
            return BigUint::zero();
        }
        self.numerators.get(i as usize).cloned().unwrap_or_default()
    }

    pub fn mass(&self, x: i64) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator_at(x)),
            BigInt::from(self.denominator()),
        )
    }

    pub fn total_mass_is_one(&self) -> bool {
        self.numerators.iter().sum::<BigUint>() == self.denominator()
    }

    /// Mirror symmetry of the numerators about the support midpoint.
    pub fn is_symmetric(&self) -> bool {
        let n = &self.numerators;
        let (lo, hi) = self.support();
        lo == -hi && (0..n.len() / 2).all(|i| n[i] == n[n.len() - 1 - i])
    }

    /// Iterator over `(x, numerator)`.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, &BigUint)> + '_ {
        self.numerators
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.offset + i as i64, c))
    }
}

/// Sliding-window convolution of counts with the all-ones kernel of length `2k+1`.
pub fn box_convolve(counts: &[BigUint], k: usize) -> Vec<BigUint> {
    let width = 2 * k + 1;
    let len = counts.len() + width - 1;
    let mut out = Vec::with_capacity(len);
    let mut window = BigUint::zero();
    for i in 0..len {
        if i < counts.len() {
            window += &counts[i];
        }
        if i >= width {
            window -= &counts[i - width];
        }
        out.push(window.clone());
    }
    out
}

/// Convolution of counts (support starting at `offset`) with the indicator of
/// an arbitrary finite set of integers. Returns the new counts and offset.
pub fn convolve_with_support(counts: &[BigUint], offset: i64, support: &[i64]) -> (Vec<BigUint>, i64) {
    let lo = *support.iter().min().expect("nonempty support");
    let hi = *support.iter().max().unwrap();
    let mut out = vec![BigUint::zero(); counts.len() + (hi - lo) as usize];
    for &s in support {
        let shift = (s - lo) as usize;
        for (i, c) in counts.iter().enumerate() {
            if !c.is_zero() {
                out[i + shift] += c;
            }
        }
    }
    (out, offset + lo)
}

/// Exact law of the sum of `m` independent uniforms on `[-K, K]`.
pub fn sum_distribution(k: u64, m: u64) -> Result<ExactDistribution> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidInput("K and m must be positive".into()));
    }
    if k.saturating_mul(m) > SUM_LAW_LIMIT {
        return Err(Error::SizeExceeded {
            what: "K*m",
            value: (k as f64) * (m as f64),
            limit: SUM_LAW_LIMIT as f64,
        });
    }
    let mut dist = ExactDistribution::uniform(k);
    for _ in 1..m {
        dist = dist.convolve_uniform(k);
    }
    Ok(dist)
}

/// Largest point mass; ties go to the smallest `x`.
pub fn max_atom(dist: &ExactDistribution) -> (i64, BigRational) {
    let mut best = 0usize;
    for (i, c) in dist.numerators.iter().enumerate() {
        if *c > dist.numerators[best] {
            best = i;
        }
    }
    let x = dist.offset + best as i64;
    (x, dist.mass(x))
}

/// `E exp(2 pi i A t)` for `A` uniform on `[-K, K]`, which is real:
/// `(1 + 2 sum_{j=1..K} cos 2 pi j t) / (2K + 1)`.
pub fn uniform_char_fn(k: u64, t: f64) -> f64 {
    let s: f64 = (1..=k).map(|j| (2.0 * PI * j as f64 * t).cos()).sum();
    (1.0 + 2.0 * s) / (2 * k + 1) as f64
}

/// Witness that a coefficient law is `p`-bounded of exponent `r`: a symmetric
/// comparison law `beta` with `P(beta = 0) = 1 - mu = p` and every mass in `[q, p]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PBoundedCertificate {
    pub p: BigRational,
    pub q: BigRational,
    pub mu: BigRational,
    pub r: u32,
    pub beta_support: Vec<(i64, BigRational)>,
}

impl PBoundedCertificate {
    /// `E exp(2 pi i beta t) = sum_v P(beta = v) cos(2 pi v t)`.
    pub fn beta_char_fn(&self, t: f64) -> f64 {
        self.beta_support
            .iter()
            .map(|(v, m)| m.to_f64().unwrap() * (2.0 * PI * *v as f64 * t).cos())
            .sum()
    }

    /// Structural conditions: `0 < q < p < 1`, `mu = 1 - p`, symmetry of beta,
    /// zero atom equal to `p`, every mass within `[q, p]`, total mass one.
    pub fn is_consistent(&self) -> bool {
        let zero = BigRational::zero();
        let one = BigRational::one();
        let ordered = zero < self.q && self.q < self.p && self.p < one;
        let mu_ok = self.mu == &one - &self.p;
        let symmetric = self.beta_support.iter().all(|(v, m)| {
            self.beta_support
                .iter()
                .any(|(w, n)| *w == -*v && n == m)
        });
        let zero_atom = self
            .beta_support
            .iter()
            .find(|(v, _)| *v == 0)
            .is_some_and(|(_, m)| *m == self.p);
        let within = self
            .beta_support
            .iter()
            .all(|(_, m)| &self.q <= m && m <= &self.p);
        let total: BigRational = self.beta_support.iter().map(|(_, m)| m.clone()).sum();
        ordered && mu_ok && symmetric && zero_atom && within && total == one
    }
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Certificate for the uniform law on `[-K, K]`: `p = 1 - 4K/(2K+1)^2`,
/// `q = 2K/(2K+1)^2`, `r = 2`, `beta = +-1` with mass `q` each. The
/// characteristic-function domination is checked on the grid `t = j / grid_size`.
pub fn certify_pbounded_uniform(k: u64, grid_size: usize) -> Result<PBoundedCertificate> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    if grid_size < MIN_GRID {
        return Err(Error::InvalidInput(format!(
            "grid_size must be at least {MIN_GRID}"
        )));
    }
    let s = (2 * k + 1) * (2 * k + 1);
    let mu = ratio(4 * k, s);
    let p = BigRational::one() - &mu;
    let q = ratio(2 * k, s);
    let cert = PBoundedCertificate {
        p: p.clone(),
        q: q.clone(),
        mu: mu.clone(),
        r: 2,
        beta_support: vec![(-1, q.clone()), (0, p.clone()), (1, q)],
    };
    debug_assert!(cert.is_consistent());
    // Condition 1: the uniform law's atoms are 1/(2K+1) <= p.
    if ratio(1, 2 * k + 1) > p {
        return Err(Error::CertificationFailure {
            t: f64::NAN,
            lhs: 1.0 / (2 * k + 1) as f64,
            rhs: p.to_f64().unwrap(),
        });
    }
    let mu_f = mu.to_f64().unwrap();
    for j in 0..grid_size {
        let t = j as f64 / grid_size as f64;
        let lhs = uniform_char_fn(k, t).powi(cert.r as i32);
        let rhs = 1.0 - mu_f + mu_f * (2.0 * PI * t).cos();
        if lhs > rhs + GRID_TOLERANCE {
            return Err(Error::CertificationFailure { t, lhs, rhs });
        }
    }
    Ok(cert)
}

/// Trapezoid estimate with its doubling-difference error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub points: usize,
}

/// Trapezoid rule for a 1-periodic integrand on `[0, 1)`, doubling the grid from
/// `start` points until successive values agree to `1e-10` (cap `2^20` points).
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, start: usize) -> QuadratureEstimate {
    let rule = |n: usize| (0..n).map(|j| f(j as f64 / n as f64)).sum::<f64>() / n as f64;
    let mut n = start.max(1);
    let mut prev = rule(n);
    loop {
        let next_n = n * 2;
        let next = rule(next_n);
        let diff = (next - prev).abs();
        if diff < QUAD_TARGET || next_n >= QUAD_CAP {
            return QuadratureEstimate {
                value: next,
                error_estimate: diff,
                points: next_n,
            };
        }
        n = next_n;
        prev = next;
    }
}

/// `int_0^1 (1 - 2q + 2q cos 2 pi t)^(m/r) dt + 1/m`, the computable right-hand
/// side of the point-mass bound for sums of `m` p-bounded variables.
///
/// For non-integer `m/r` the integrand uses the absolute value of the base, which
/// only matters when `q > 1/4`.
pub fn lwo_rhs(q: &BigRational, m: u64, r: u32, quad_points: usize) -> Result<QuadratureEstimate> {
    let half = ratio(1, 2);
    if *q <= BigRational::zero() || *q >= half {
        return Err(Error::InvalidInput("q must lie in (0, 1/2)".into()));
    }
    if r == 0 || m < r as u64 {
        return Err(Error::InvalidInput("need m >= r >= 1".into()));
    }
    if quad_points < MIN_QUAD_POINTS {
        return Err(Error::InvalidInput(format!(
            "quad_points must be at least {MIN_QUAD_POINTS}"
        )));
    }
    let qf = q.to_f64().unwrap();
    let integer_power = m.is_multiple_of(r as u64).then(|| (m / r as u64) as i32);
    let exponent = m as f64 / r as f64;
    let integrand = |t: f64| {
        let base = 1.0 - 2.0 * qf + 2.0 * qf * (2.0 * PI * t).cos();
        match integer_power {
            Some(e) => base.powi(e),
            None => base.abs().powf(exponent),
        }
    };
    let mut est = periodic_trapezoid(integrand, quad_points);
    est.value += 1.0 / m as f64;
    Ok(est)
}

/// `(1/(2K+1))^m + 2/K`.
pub fn point_mass_bound(k: u64, m: u64) -> BigRational {
    let base = BigInt::from(2 * k + 1).pow(m as u32);
    BigRational::new(BigInt::one(), base) + ratio(2, k)
}

/// Exact check of `P(S_m = x) <= (1/(2K+1))^m + 2/K` at every `x`; returns the
/// first violating `x`, if any.
pub fn point_mass_violation(dist: &ExactDistribution, k: u64) -> Option<i64> {
    let (base, _) = dist.denominator_parts();
    assert_eq!(base, 2 * k + 1);
    // num / (2K+1)^m <= 1/(2K+1)^m + 2/K  <=>  K num <= K + 2 (2K+1)^m
    let rhs = BigUint::from(k) + BigUint::from(2u32) * dist.denominator();
    let kk = BigUint::from(k);
    dist.atoms()
        .find(|(_, c)| &kk * *c > rhs)
        .map(|(x, _)| x)
}

/// `(1 - 2^(1-l)) K^(l-1)`.
pub fn cosine_integral_bound(k: u64, l: u32) -> BigRational {
    assert!(l >= 1);
    let two_pow = BigInt::one() << (l as usize - 1);
    let frac = BigRational::new(&two_pow - BigInt::one(), two_pow);
    frac * BigRational::from_integer(BigInt::from(k).pow(l - 1))
}

/// `int_0^1 (sum_{j=1..K} cos 2 pi j t)^l dt`, exactly, as the number of
/// tuples `(j_1..j_l, s_2..s_l)` with `j_1 + s_2 j_2 + ... + s_l j_l = 0`
/// divided by `2^(l-1)`.
pub fn lemma21_integral(k: u64, l: u32) -> Result<BigRational> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidInput("K and l must be positive".into()));
    }
    let work = (k as f64).powi(l as i32) * 2f64.powi(l as i32);
    if work > LEMMA21_LIMIT as f64 {
        return Err(Error::SizeExceeded {
            what: "K^l * 2^l",
            value: work,
            limit: LEMMA21_LIMIT as f64,
        });
    }
    let l = l as usize;
    let mut count: u64 = 0;
    let mut js = vec![1i64; l];
    let sign_patterns = 1u64 << (l - 1);
    loop {
        for signs in 0..sign_patterns {
            let mut s = js[0];
            for (i, &j) in js.iter().enumerate().skip(1) {
                if signs >> (i - 1) & 1 == 1 {
                    s -= j;
                } else {
                    s += j;
                }
            }
            if s == 0 {
                count += 1;
            }
        }
        // odometer over j in [1, K]^l
        let mut pos = 0;
        loop {
            if pos == l {
                return Ok(BigRational::new(
                    BigInt::from(count),
                    BigInt::from(sign_patterns),
                ));
            }
            if js[pos] < k as i64 {
                js[pos] += 1;
                break;
            }
            js[pos] = 1;
            pos += 1;
        }
    }
}

/// `prod_i cos(2 pi t j_i)`.
pub fn cosine_product(t: f64, js: &[i64]) -> f64 {
    js.iter().map(|&j| (2.0 * PI * t * j as f64).cos()).product()
}

/// `2^(1-l) sum_{s_2..s_l} cos(2 pi t (j_1 + s_2 j_2 + ... + s_l j_l))`.
pub fn cosine_product_as_sum(t: f64, js: &[i64]) -> f64 {
    let l = js.len();
    assert!(l >= 1);
    let patterns = 1u64 << (l - 1);
    let total: f64 = (0..patterns)
        .map(|signs| {
            let s: i64 = js[0]
                + js[1..]
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| if signs >> i & 1 == 1 { -j } else { j })
                    .sum::<i64>();
            (2.0 * PI * t * s as f64).cos()
        })
        .sum();
    total / patterns as f64
}

/// Empirical constant `max_x P(S_m = x) * sqrt(q m / r)` for the uniform law.
pub fn lwo_constant_ratio(k: u64, m: u64) -> Result<f64> {
    let dist = sum_distribution(k, m)?;
    let (_, mass) = max_atom(&dist);
    let q = (2 * k) as f64 / ((2 * k + 1) * (2 * k + 1)) as f64;
    Ok(mass.to_f64().unwrap() * (q * m as f64 / 2.0).sqrt())
}
