//! Linear Hensel lifting of a modular factorization and Zassenhaus-style
//! recombination restricted to low-degree candidates.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::{Error, IntPolynomial, ModPolynomial, Result};

/// Recombination refuses to enumerate more candidate subsets than this.
pub const MAX_SUBSETS: u64 = 1 << 24;

/// `f = g * h (mod p^k)` lifted from `f = g * h (mod p)`; `g`, `h` monic and
/// coprime modulo `p`. Returns lifts with coefficients in `[0, p^k)`.
fn lift_pair(
    f: &IntPolynomial,
    g: &ModPolynomial,
    h: &ModPolynomial,
    steps: u32,
) -> (IntPolynomial, IntPolynomial) {
    let p = g.modulus();
    let (one, s, t) = g.ext_gcd(h);
    debug_assert!(one.is_one(), "factors must be coprime modulo p");
    let mut gl = g.to_int_polynomial();
    let mut hl = h.to_int_polynomial();
    let pb = BigInt::from(p);
    let mut pk = pb.clone();
    for _ in 1..steps {
        let diff = f - &(&gl * &hl);
        let e_int = IntPolynomial::from_coeffs(diff.coeffs().iter().map(|c| c / &pk).collect());
        debug_assert!(e_int.scale(&pk) == diff);
        let e = ModPolynomial::reduce(&e_int, p);
        let te = t.mul(&e);
        let (q, dg) = te.divrem(g);
        let dh = s.mul(&e).add(&q.mul(h));
        debug_assert!(dh.degree().is_none_or(|d| d < h.degree().unwrap_or(0)));
        gl = &gl + &dg.to_int_polynomial().scale(&pk);
        hl = &hl + &dh.to_int_polynomial().scale(&pk);
        pk *= &pb;
    }
    (gl, hl)
}

/// Lifts the monic factorization `f = prod factors (mod p)` to modulus `p^steps`.
pub fn multifactor_lift(f: &IntPolynomial, factors: &[ModPolynomial], steps: u32) -> Vec<IntPolynomial> {
    let p = factors[0].modulus();
    let pk = BigInt::from(p).pow(steps);
    let mut out = Vec::with_capacity(factors.len());
    let mut current = f.reduce_mod(&pk);
    for (i, g) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            out.push(current);
            break;
        }
        let rest = factors[i + 1..]
            .iter()
            .fold(ModPolynomial::one(p), |acc, u| acc.mul(u));
        let (gl, hl) = lift_pair(&current, g, &rest, steps);
        out.push(gl.reduce_mod(&pk));
        current = hl.reduce_mod(&pk);
    }
    out
}

/// Number of subsets of `degrees` with positive total at most `cap`, saturating
/// at `u64::MAX`.
pub fn count_subsets(degrees: &[usize], cap: usize) -> u64 {
    let mut ways = vec![0u64; cap + 1];
    ways[0] = 1;
    for &d in degrees {
        for total in (d..=cap).rev() {
            ways[total] = ways[total].saturating_add(ways[total - d]);
        }
    }
    ways[1..].iter().fold(0u64, |a, &b| a.saturating_add(b))
}

/// Next `k`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Irreducible monic factors of degree at most `m_max` of the monic squarefree
/// `f`, given lifted factors modulo `modulus` (larger than twice every
/// coefficient of a candidate divisor). Subsets are tried by cardinality, then
/// lexicographically; a confirmed factor is divided out and its modular factors
/// removed before the search continues.
pub fn recombine(
    f: &IntPolynomial,
    lifted: Vec<IntPolynomial>,
    modulus: &BigInt,
    m_max: usize,
) -> Result<Vec<IntPolynomial>> {
    let degrees: Vec<usize> = lifted.iter().map(|u| u.degree().unwrap()).collect();
    let subsets = count_subsets(&degrees, m_max);
    if subsets > MAX_SUBSETS {
        return Err(Error::DegreeTooLarge { subsets });
    }
    let mut remaining = lifted;
    let mut cofactor = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while size <= remaining.len() {
        let n = remaining.len();
        let mut idx: Vec<usize> = (0..size).collect();
        let mut hit = None;
        loop {
            let deg: usize = idx.iter().map(|&i| remaining[i].degree().unwrap()).sum();
            if deg <= m_max {
                let candidate = idx
                    .iter()
                    .fold(IntPolynomial::one(), |acc, &i| (&acc * &remaining[i]).reduce_mod(modulus))
                    .symmetric_mod(modulus);
                let c0 = candidate.constant_term();
                let f0 = cofactor.constant_term();
                if !c0.is_zero() && (&f0 % &c0).is_zero() {
                    if let Some(q) = cofactor.div_exact(&candidate)? {
                        hit = Some((idx.clone(), candidate, q));
                        break;
                    }
                }
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        match hit {
            Some((idx, g, q)) => {
                for &i in idx.iter().rev() {
                    remaining.remove(i);
                }
                found.push(g);
                cofactor = q;
            }
            None => size += 1,
        }
    }
    Ok(found)
}

/// Smallest `k` with `p^k > 2 * bound`.
pub fn lift_steps(p: u64, bound: &BigInt) -> u32 {
    let target = bound * 2u32;
    let pb = BigInt::from(p);
    let mut pk = pb.clone();
    let mut k = 1;
    while pk <= target {
        pk *= &pb;
        k += 1;
    }
    k
}

/// `2^m * ceil(||f||_2)`, bounding every coefficient of a degree-`m` monic divisor.
pub fn landau_mignotte(f: &IntPolynomial, m: usize) -> BigInt {
    let l2 = f.l2_norm_squared();
    let mut root = l2.sqrt();
    if &root * &root < l2 {
        root += BigInt::one();
    }
    root << m
}
