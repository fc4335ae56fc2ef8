//! Exhaustive enumeration of `P_{d,K}` with an exact word-sized classifier.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{degree_pattern, smallest_factor_degree, PATTERN_PRIMES};
use crate::{primes, Error, IntPolynomial, ModPolynomial, Result};

/// Exhaustiveness guard: `2K (2K+1)^(d-1)` may not exceed this.
pub const CENSUS_LIMIT: u64 = 10_000_000;
const CHUNK: u64 = 1 << 14;
const SMALL_PRIME_SCAN: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CensusMode {
    /// Count reducible polynomials.
    Reducibility,
    /// Count polynomials with a proper factor of degree at most `m`.
    LowDegreeDivisor { m: usize },
}

impl CensusMode {
    pub fn label(&self) -> String {
        match self {
            Self::Reducibility => "reducibility".into(),
            Self::LowDegreeDivisor { m } => format!("low_degree_divisor({m})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusResult {
    pub d: usize,
    pub k: u64,
    pub mode: CensusMode,
    pub total: BigUint,
    pub reducible: BigUint,
    /// Counted polynomials keyed by the degree of their smallest irreducible factor.
    pub by_factor_degree: BTreeMap<usize, u64>,
    pub runtime: Duration,
}

fn eval_i128(c: &[i64], r: i64) -> Option<i128> {
    let mut acc: i128 = 0;
    for &a in c.iter().rev() {
        acc = acc.checked_mul(r as i128)?.checked_add(a as i128)?;
    }
    Some(acc)
}

fn has_integer_root(c: &[i64]) -> bool {
    let a0 = c[0].unsigned_abs();
    let bound = 1 + c[..c.len() - 1].iter().map(|a| a.unsigned_abs()).max().unwrap_or(0);
    let f = std::cell::OnceCell::new();
    let is_root = |r: i64| match eval_i128(c, r) {
        Some(v) => v == 0,
        None => f
            .get_or_init(|| IntPolynomial::from_i64(c))
            .evaluate_i64(r)
            .eq(&num_bigint::BigInt::ZERO),
    };
    (1..=a0.min(bound))
        .filter(|r| a0.is_multiple_of(*r))
        .any(|r| is_root(r as i64) || is_root(-(r as i64)))
}

const SMALL_N: usize = 33;

/// Dense polynomial over `F_p` on the stack, for the census fast path.
#[derive(Clone, Copy)]
struct SmallPoly {
    c: [u32; SMALL_N],
    len: usize,
}

impl SmallPoly {
    fn from_slice(c: &[u32]) -> Self {
        let mut out = SmallPoly { c: [0; SMALL_N], len: c.len() };
        out.c[..c.len()].copy_from_slice(c);
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.len > 0 && self.c[self.len - 1] == 0 {
            self.len -= 1;
        }
    }

    fn degree(&self) -> usize {
        self.len.saturating_sub(1)
    }

    fn is_one(&self) -> bool {
        self.len == 1 && self.c[0] == 1
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut base, mut e, mut acc) = (a as u64, p as u64 - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// `a mod b` in place, `b` nonzero.
fn rem_in_place(a: &mut SmallPoly, b: &SmallPoly, p: u32) {
    let db = b.len - 1;
    let inv = inv_mod(b.c[db], p) as u64;
    let p64 = p as u64;
    while a.len > db {
        let top = a.len - 1;
        let q = a.c[top] as u64 * inv % p64;
        if q != 0 {
            let shift = top - db;
            for j in 0..=db {
                let sub = q * b.c[j] as u64 % p64;
                a.c[shift + j] = ((a.c[shift + j] as u64 + p64 - sub) % p64) as u32;
            }
        }
        a.len -= 1;
        a.trim();
    }
}

fn mul_mod(a: &SmallPoly, b: &SmallPoly, m: &SmallPoly, p: u32) -> SmallPoly {
    if a.len == 0 || b.len == 0 {
        return SmallPoly { c: [0; SMALL_N], len: 0 };
    }
    let mut wide = [0u64; 2 * SMALL_N];
    let p64 = p as u64;
    for i in 0..a.len {
        for j in 0..b.len {
            wide[i + j] = (wide[i + j] + a.c[i] as u64 * b.c[j] as u64) % p64;
        }
    }
    // reduce the wide product by m, high to low
    let len = a.len + b.len - 1;
    let dm = m.len - 1;
    let inv = inv_mod(m.c[dm], p) as u64;
    for top in (dm..len).rev() {
        let q = wide[top] * inv % p64;
        if q != 0 {
            let shift = top - dm;
            for j in 0..=dm {
                wide[shift + j] = (wide[shift + j] + p64 - q * m.c[j] as u64 % p64) % p64;
            }
        }
    }
    let mut out = SmallPoly { c: [0; SMALL_N], len: dm.min(len) };
    for i in 0..out.len {
        out.c[i] = wide[i] as u32;
    }
    out.trim();
    out
}

fn gcd_small(a: &SmallPoly, b: &SmallPoly, p: u32) -> SmallPoly {
    let (mut a, mut b) = (*a, *b);
    while b.len > 0 {
        rem_in_place(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
    if a.len > 0 {
        let inv = inv_mod(a.c[a.len - 1], p) as u64;
        for i in 0..a.len {
            a.c[i] = (a.c[i] as u64 * inv % p as u64) as u32;
        }
    }
    a
}

fn exact_div_small(a: &SmallPoly, b: &SmallPoly, p: u32) -> SmallPoly {
    let db = b.len - 1;
    let inv = inv_mod(b.c[db], p) as u64;
    let p64 = p as u64;
    let mut r = *a;
    let mut q = SmallPoly { c: [0; SMALL_N], len: a.len - db };
    for top in (db..a.len).rev() {
        let coef = r.c[top] as u64 * inv % p64;
        q.c[top - db] = coef as u32;
        if coef != 0 {
            for j in 0..=db {
                let i = top - db + j;
                r.c[i] = ((r.c[i] as u64 + p64 - coef * b.c[j] as u64 % p64) % p64) as u32;
            }
        }
    }
    q.trim();
    q
}

/// Factor-degree subset sums of the monic `c` modulo `p`, `None` when not
/// squarefree modulo `p`.
fn small_pattern(c: &[i64], p: u32) -> Option<u128> {
    let res: Vec<u32> = c.iter().map(|&a| a.rem_euclid(p as i64) as u32).collect();
    let mut f = SmallPoly::from_slice(&res);
    let deriv: Vec<u32> = (1..res.len())
        .map(|i| ((i as u64 % p as u64) * res[i] as u64 % p as u64) as u32)
        .collect();
    let df = SmallPoly::from_slice(&deriv);
    if df.len == 0 || !gcd_small(&f, &df, p).is_one() {
        return None;
    }
    let mut pattern = 1u128;
    let mut push = |deg: usize, count: usize| {
        for _ in 0..count {
            pattern |= pattern << deg;
        }
    };
    let z = SmallPoly::from_slice(&[0, 1]);
    let mut h = z;
    let mut i = 0;
    while f.degree() >= 2 * (i + 1) {
        i += 1;
        // h <- h^p mod f
        let (mut base, mut acc, mut e) = (h, SmallPoly::from_slice(&[1]), p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, &f, p);
            }
            base = mul_mod(&base, &base, &f, p);
            e >>= 1;
        }
        h = acc;
        let mut hz = h;
        if hz.len < 2 {
            hz.len = 2;
        }
        hz.c[1] = (hz.c[1] + p - 1) % p;
        hz.trim();
        let g = gcd_small(&f, &hz, p);
        if g.degree() > 0 {
            push(i, g.degree() / i);
            f = exact_div_small(&f, &g, p);
            rem_in_place(&mut h, &f, p);
        }
    }
    if f.degree() > 0 {
        push(f.degree(), 1);
    }
    Some(pattern)
}

/// Whether `z^2 + a z + b` divides the monic `c`.
fn divides_by_quadratic(c: &[i64], a: i128, b: i128) -> bool {
    // synthetic division from the top; a true quotient has small coefficients
    let d = c.len() - 1;
    let (mut hi, mut lo) = (0i128, 0i128);
    let mut q = vec![0i128; d - 1];
    for i in (0..d - 1).rev() {
        let qi = c[i + 2] as i128 - a * hi - b * lo;
        if qi.abs() > 1 << 100 {
            return false;
        }
        q[i] = qi;
        lo = hi;
        hi = qi;
    }
    let q1 = q.get(1).copied().unwrap_or(0);
    c[1] as i128 == a * q[0] + b * q1 && c[0] as i128 == b * q[0]
}

/// Whether the monic `c` has a quadratic factor over Z. Roots lie in
/// `|z| < 1 + H` with `H` the largest lower coefficient, which bounds the
/// candidates.
fn has_quadratic_factor(c: &[i64]) -> bool {
    let d = c.len() - 1;
    let h = c[..d].iter().map(|v| v.unsigned_abs() as i128).max().unwrap_or(0);
    let a_max = 2 * (1 + h);
    let a0 = c[0] as i128;
    let limit = a0.unsigned_abs();
    let mut x = 1u128;
    while x * x <= limit {
        if limit.is_multiple_of(x) {
            for b in [x as i128, -(x as i128), (limit / x) as i128, -((limit / x) as i128)] {
                if b.abs() > (1 + h) * (1 + h) {
                    continue;
                }
                for a in -a_max..=a_max {
                    if divides_by_quadratic(c, a, b) {
                        return true;
                    }
                }
            }
        }
        x += 1;
    }
    false
}

/// Whether the monic quartic `c` splits as `(z^2 + a z + b)(z^2 + s z + e)` over Z.
fn has_quadratic_pair(c: &[i64]) -> bool {
    let [a0, a1, a2, a3, _] = [c[0], c[1], c[2], c[3], c[4]].map(|v| v as i128);
    let limit = a0.unsigned_abs();
    let mut b = 1u128;
    while b * b <= limit {
        if limit % b == 0 {
            for (x, y) in [(b, limit / b), (limit / b, b)] {
                for sign in [1i128, -1] {
                    let b = sign * x as i128;
                    let e = a0 / b;
                    if b * e != a0 || y as i128 != e.abs() {
                        continue;
                    }
                    // a + s = a3, a s + b + e = a2, a e + s b = a1
                    if e != b {
                        let num = a1 - a3 * b;
                        if num % (e - b) == 0 {
                            let a = num / (e - b);
                            if a * (a3 - a) + b + e == a2 {
                                return true;
                            }
                        }
                    } else if a1 == a3 * b && is_square(a3 * a3 - 4 * (a2 - 2 * b)) {
                        return true;
                    }
                }
            }
        }
        b += 1;
    }
    false
}

fn is_square(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(1)..=r + 1).any(|s| s >= 0 && s * s == n)
}

/// Smallest degree of a proper irreducible factor of the monic polynomial with
/// coefficients `c` (low to high, `c[0] != 0`), or `None` when irreducible.
///
/// Quadratics use the discriminant, cubics the integer-root test; higher
/// degrees first try to rule out every proper factor degree from factorization
/// patterns modulo small primes and fall back to lifting otherwise.
pub fn classify_small(c: &[i64]) -> Result<Option<usize>> {
    let d = c.len().saturating_sub(1);
    if d == 0 || c[d] != 1 || c[0] == 0 {
        return Err(Error::InvalidInput("expected monic coefficients with c[0] != 0".into()));
    }
    match d {
        1 => return Ok(None),
        2 => {
            let disc = (c[1] as i128).pow(2) - 4 * c[0] as i128;
            return Ok(is_square(disc).then_some(1));
        }
        _ => {}
    }
    if has_integer_root(c) {
        return Ok(Some(1));
    }
    if d == 3 {
        return Ok(None);
    }
    if d == 4 {
        return Ok(has_quadratic_pair(c).then_some(2));
    }
    if d < 128 {
        let interior = (u128::MAX >> (128 - d)) & !1u128;
        let mut common = u128::MAX;
        let mut good = 0;
        for p in primes::odd_primes().take(SMALL_PRIME_SCAN) {
            let pattern = if d < SMALL_N {
                small_pattern(c, p as u32)
            } else {
                let fp = ModPolynomial::from_i64(p, c);
                fp.is_squarefree().then(|| degree_pattern(&fp))
            };
            let Some(pattern) = pattern else { continue };
            common &= pattern;
            if common & interior == 0 {
                return Ok(None);
            }
            good += 1;
            if good == PATTERN_PRIMES {
                break;
            }
        }
        if common & 0b100 != 0 && has_quadratic_factor(c) {
            return Ok(Some(2));
        }
        if d == 5 {
            return Ok(None);
        }
    }
    smallest_factor_degree(&IntPolynomial::from_i64(c))
}

/// Number of members of `P_{d,K}`.
pub fn family_size(d: usize, k: u64) -> BigUint {
    BigUint::from(2 * k) * BigUint::from(2 * k + 1).pow(d as u32 - 1)
}

/// Coefficients of the member with the given index: the constant term runs
/// over `-K..-1, 1..K` fastest, then `a_1, ..., a_{d-1}` over `[-K, K]`.
pub fn member(d: usize, k: u64, mut index: u64) -> Vec<i64> {
    let k = k as i64;
    let mut c = Vec::with_capacity(d + 1);
    let a0 = (index % (2 * k) as u64) as i64 - k;
    c.push(if a0 >= 0 { a0 + 1 } else { a0 });
    index /= (2 * k) as u64;
    let width = (2 * k + 1) as u64;
    for _ in 1..d {
        c.push((index % width) as i64 - k);
        index /= width;
    }
    c.push(1);
    c
}

fn advance(c: &mut [i64], k: i64) {
    let d = c.len() - 1;
    c[0] = match c[0] {
        -1 => 1,
        x if x == k => -k,
        x => x + 1,
    };
    if c[0] != -k {
        return;
    }
    for a in c[1..d].iter_mut() {
        if *a < k {
            *a += 1;
            return;
        }
        *a = -k;
    }
}

/// Exact counts over every member of `P_{d,K}`, in parallel over index ranges.
pub fn census(d: usize, k: u64, mode: CensusMode) -> Result<CensusResult> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidInput("need d >= 1 and K >= 1".into()));
    }
    if let CensusMode::LowDegreeDivisor { m: 0 } = mode {
        return Err(Error::InvalidInput("low_degree_divisor needs m >= 1".into()));
    }
    let size = (2 * k) as f64 * ((2 * k + 1) as f64).powi(d as i32 - 1);
    if size > CENSUS_LIMIT as f64 {
        return Err(Error::SizeExceeded { what: "2K(2K+1)^(d-1)", value: size, limit: CENSUS_LIMIT as f64 });
    }
    let total = size as u64;
    let start = Instant::now();
    let cap = match mode {
        CensusMode::Reducibility => d,
        CensusMode::LowDegreeDivisor { m } => m,
    };
    let chunks = total.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<Vec<u64>> {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut local = vec![0u64; d + 1];
            let mut c = member(d, k, lo);
            for _ in lo..hi {
                if let Some(m) = classify_small(&c)? {
                    if m <= cap {
                        local[m] += 1;
                    }
                }
                advance(&mut c, k as i64);
            }
            Ok(local)
        })
        .try_reduce(
            || vec![0u64; d + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let by_factor_degree: BTreeMap<usize, u64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(m, &n)| (m, n))
        .collect();
    let reducible: u64 = by_factor_degree.values().sum();
    Ok(CensusResult {
        d,
        k,
        mode,
        total: BigUint::from(total),
        reducible: BigUint::from(reducible),
        by_factor_degree,
        runtime: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorlab::is_irreducible;

    #[test]
    fn small_pattern_matches_modular_factorization() {
        for (d, k) in [(4usize, 2u64), (5, 1), (7, 1)] {
            let n: u64 = family_size(d, k).try_into().unwrap();
            for i in 0..n {
                let c = member(d, k, i);
                for p in [3u64, 5, 7, 11, 13] {
                    let fp = ModPolynomial::from_i64(p, &c);
                    let expect = fp.is_squarefree().then(|| degree_pattern(&fp));
                    assert_eq!(small_pattern(&c, p as u32), expect, "{c:?} mod {p}");
                }
            }
        }
    }

    #[test]
    fn quadratic_factor_detection() {
        assert!(has_quadratic_factor(&[1, 0, 1, 0, 1, 0, 1])); // (z^2+1)(z^4+1)
        assert!(!has_quadratic_factor(&[1, 1, 1, 1, 1])); // fifth cyclotomic
        assert!(has_quadratic_factor(&[-6, 1, 0, 0, 0, 1]));
        for (d, k) in [(5usize, 1u64), (6, 1), (5, 2)] {
            let n: u64 = family_size(d, k).try_into().unwrap();
            for i in 0..n {
                let c = member(d, k, i);
                let f = IntPolynomial::from_i64(&c);
                let exact = crate::factorlab::low_degree_factors(&f, 2).unwrap();
                let expect = exact.factors.iter().any(|(g, _)| g.degree() == Some(2))
                    || exact.factors.iter().filter(|(g, _)| g.degree() == Some(1)).map(|(_, e)| e).sum::<usize>() >= 2;
                assert_eq!(has_quadratic_factor(&c), expect, "{f}");
            }
        }
    }

    #[test]
    fn census_examples() {
        let r = census(2, 1, CensusMode::Reducibility).unwrap();
        assert_eq!((r.total.clone(), r.reducible.clone()), (6u32.into(), 1u32.into()));
        let r = census(2, 2, CensusMode::Reducibility).unwrap();
        assert_eq!((r.total.clone(), r.reducible.clone()), (20u32.into(), 5u32.into()));
        for k in 1..6 {
            let r = census(1, k, CensusMode::Reducibility).unwrap();
            assert_eq!(r.reducible, 0u32.into());
            assert_eq!(r.total, BigUint::from(2 * k));
        }
        assert!(matches!(census(12, 3, CensusMode::Reducibility), Err(Error::SizeExceeded { .. })));
    }

    #[test]
    fn enumeration_covers_family_once() {
        for (d, k) in [(1usize, 3u64), (2, 2), (3, 1), (4, 2)] {
            let total = family_size(d, k);
            let n: u64 = total.try_into().unwrap();
            let mut seen = std::collections::BTreeSet::new();
            let mut c = member(d, k, 0);
            for i in 0..n {
                assert_eq!(c, member(d, k, i));
                assert!(IntPolynomial::from_i64(&c).in_family(d, k));
                seen.insert(c.clone());
                advance(&mut c, k as i64);
            }
            assert_eq!(seen.len() as u64, n);
        }
    }

    #[test]
    fn fixed_constant_term_count() {
        // members sharing a given constant term number (2K+1)^(d-1)
        for (d, k) in [(3usize, 2u64), (4, 1)] {
            let n: u64 = family_size(d, k).try_into().unwrap();
            let with_one = (0..n).filter(|&i| member(d, k, i)[0] == 1).count() as u64;
            assert_eq!(with_one, (2 * k + 1).pow(d as u32 - 1));
        }
    }

    #[test]
    fn classifier_agrees_with_irreducibility_test() {
        for (d, k) in [(3usize, 2u64), (4, 2), (4, 4), (5, 1), (6, 1)] {
            let n: u64 = family_size(d, k).try_into().unwrap();
            for i in 0..n {
                let c = member(d, k, i);
                let f = IntPolynomial::from_i64(&c);
                let fast = classify_small(&c).unwrap();
                assert_eq!(fast.is_none(), is_irreducible(&f).unwrap().0, "{f}");
                assert_eq!(fast, smallest_factor_degree(&f).unwrap(), "{f}");
            }
        }
    }

    #[test]
    fn low_degree_mode_is_a_truncation() {
        let full = census(5, 1, CensusMode::Reducibility).unwrap();
        let low = census(5, 1, CensusMode::LowDegreeDivisor { m: 1 }).unwrap();
        assert_eq!(low.by_factor_degree.get(&1), full.by_factor_degree.get(&1));
        assert!(low.by_factor_degree.keys().all(|&m| m <= 1));
    }

    #[test]
    fn census_is_partition_independent() {
        let a = census(6, 1, CensusMode::Reducibility).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| census(6, 1, CensusMode::Reducibility).unwrap());
        assert_eq!((a.reducible, a.by_factor_degree), (b.reducible, b.by_factor_degree));
    }
}
