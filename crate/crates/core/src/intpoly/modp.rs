//! Polynomials over the prime field `F_p` for word-sized `p`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::IntPolynomial;

/// Dense polynomial with residues in `[0, modulus)`; the leading residue is
/// nonzero unless the polynomial is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModPolynomial {
    modulus: u64,
    coeffs: Vec<u64>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i128) as u64
}

impl ModPolynomial {
    /// `modulus` must be a prime below `2^31`.
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Self {
        assert!((2..(1 << 31)).contains(&modulus), "modulus out of range");
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % modulus).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { modulus, coeffs }
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(modulus, Vec::new())
    }

    pub fn one(modulus: u64) -> Self {
        Self::new(modulus, vec![1])
    }

    pub fn z(modulus: u64) -> Self {
        Self::new(modulus, vec![0, 1])
    }

    pub fn from_i64(modulus: u64, coeffs: &[i64]) -> Self {
        let m = modulus as i64;
        Self::new(modulus, coeffs.iter().map(|&c| c.rem_euclid(m) as u64).collect())
    }

    /// Reduction `Z[z] -> F_p[z]`.
    pub fn reduce(f: &IntPolynomial, modulus: u64) -> Self {
        let m = BigInt::from(modulus);
        Self::new(
            modulus,
            f.coeffs()
                .iter()
                .map(|c| c.mod_floor(&m).to_u64().unwrap())
                .collect(),
        )
    }

    /// Lift to `Z[z]` with coefficients in `[0, p)`.
    pub fn to_int_polynomial(&self) -> IntPolynomial {
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn leading(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    fn with(&self, coeffs: Vec<u64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { modulus: self.modulus, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        let p = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % p
            })
            .collect();
        self.with(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        let p = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        self.with(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.modulus);
        }
        let p = self.modulus;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        self.with(out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.modulus;
        self.with(self.coeffs.iter().map(|&a| a * (c % p) % p).collect())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None | Some(1) => self.clone(),
            Some(lc) => self.scale(inv_mod(lc, self.modulus)),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, g: &Self) -> (Self, Self) {
        let p = self.modulus;
        let dg = g.degree().expect("division by zero polynomial");
        if self.coeffs.len() <= dg {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(g.coeffs[dg], p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dg];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dg] * inv % p;
            rem[i + dg] = 0;
            if c == 0 {
                continue;
            }
            for j in 0..dg {
                rem[i + j] = (rem[i + j] + p - c * g.coeffs[j] % p) % p;
            }
            quot[i] = c;
        }
        rem.truncate(dg);
        (self.with(quot), self.with(rem))
    }

    pub fn rem(&self, g: &Self) -> Self {
        self.divrem(g).1
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let p = self.modulus;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s2);
            (t0, t1) = (t1, t2);
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = inv_mod(lc, p);
                (r0.scale(inv), s0.scale(inv), t0.scale(inv))
            }
        }
    }

    pub fn derivative(&self) -> Self {
        let p = self.modulus;
        self.with(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| (i as u64 % p) * c % p)
                .collect(),
        )
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.modulus).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    fn pow_mod_u64(&self, e: u64, m: &Self) -> Self {
        self.pow_mod(&BigUint::from(e), m)
    }

    /// True when the polynomial has no repeated factor over `F_p` (and is nonconstant
    /// or a nonzero constant).
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => {
                let d = self.derivative();
                !d.is_zero() && self.gcd(&d).is_one()
            }
        }
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// pairs `(g_i, i)` where `g_i` is the product of all irreducible factors of
    /// degree `i`. Only nontrivial `g_i` are returned.
    pub fn distinct_degree_factorization(&self) -> Vec<(Self, usize)> {
        self.ddf_upto(usize::MAX)
    }

    /// Degrees `<= max` among the irreducible factors of a monic squarefree
    /// polynomial, with multiplicity.
    pub fn low_factor_degrees(&self, max: usize) -> Vec<usize> {
        let mut degs = Vec::new();
        for (g, i) in self.ddf_upto(max) {
            if i <= max {
                degs.extend(std::iter::repeat_n(i, g.degree().unwrap() / i));
            }
        }
        degs
    }

    fn ddf_upto(&self, max: usize) -> Vec<(Self, usize)> {
        let p = self.modulus;
        let mut f = self.monic();
        let mut out = Vec::new();
        let z = Self::z(p);
        let mut h = z.clone();
        let mut i = 0;
        while let Some(df) = f.degree() {
            if df < 2 * (i + 1) || i >= max {
                break;
            }
            i += 1;
            h = h.pow_mod_u64(p, &f);
            let g = f.gcd(&h.sub(&z));
            if !g.is_one() {
                f = f.divrem(&g).0;
                h = h.rem(&f);
                out.push((g, i));
            }
        }
        if f.degree().unwrap_or(0) > 0 {
            let d = f.degree().unwrap();
            out.push((f, d));
        }
        out
    }

    /// Degrees of the irreducible factors of a monic squarefree polynomial.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut degs = Vec::new();
        for (g, i) in self.distinct_degree_factorization() {
            let n = g.degree().unwrap() / i;
            degs.extend(std::iter::repeat_n(i, n));
        }
        degs
    }

    /// Cantor-Zassenhaus splitting of a monic squarefree product of irreducibles
    /// of common degree `d` (odd `p`).
    pub fn equal_degree_factorization<R: Rng>(&self, d: usize, rng: &mut R) -> Vec<Self> {
        let p = self.modulus;
        assert!(p % 2 == 1, "equal-degree splitting needs an odd modulus");
        let n = self.degree().unwrap_or(0);
        if n == d {
            return vec![self.monic()];
        }
        let e = (BigUint::from(p).pow(d as u32) - 1u32) >> 1;
        loop {
            let a = self.with((0..n).map(|_| rng.random_range(0..p)).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let g = self.gcd(&a);
            let split = if !g.is_one() {
                g
            } else {
                let b = a.pow_mod(&e, self).sub(&Self::one(p));
                self.gcd(&b)
            };
            let ds = split.degree().unwrap_or(0);
            if ds > 0 && ds < n {
                let other = self.divrem(&split).0;
                let mut out = split.equal_degree_factorization(d, rng);
                out.extend(other.equal_degree_factorization(d, rng));
                return out;
            }
        }
    }

    /// Complete factorization of a monic squarefree polynomial into monic irreducibles.
    pub fn factor_squarefree<R: Rng>(&self, rng: &mut R) -> Vec<Self> {
        let mut out = Vec::new();
        for (g, d) in self.distinct_degree_factorization() {
            out.extend(g.equal_degree_factorization(d, rng));
        }
        out.sort_by(|a, b| a.coeffs.len().cmp(&b.coeffs.len()).then(a.coeffs.cmp(&b.coeffs)));
        out
    }

    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(n) => {
                self.is_squarefree() && self.factor_degrees() == vec![n]
            }
        }
    }
}
