//! Dense univariate polynomials over the integers and over prime fields.
//!
//! [`IntPolynomial`] stores coefficients in increasing degree order with
//! arbitrary-precision entries. The zero polynomial is the empty sequence and
//! has degree `None` (minus infinity).

mod modp;
mod text;

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub use modp::ModPolynomial;

/// Above this many coefficients per operand, multiplication switches to Karatsuba.
const KARATSUBA_THRESHOLD: usize = 32;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Exact ring arithmetic on two polynomials.
pub fn poly_arith(f: &IntPolynomial, g: &IntPolynomial, op: ArithOp) -> IntPolynomial {
    match op {
        ArithOp::Add => f + g,
        ArithOp::Sub => f - g,
        ArithOp::Mul => f * g,
    }
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The indeterminate `z`.
    pub fn z() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    /// `z^n - 1`.
    pub fn z_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] += 1;
        coeffs[0] -= 1;
        Self::from_coeffs(coeffs)
    }

    /// Builds a polynomial from low-to-high coefficients, trimming high zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Low-to-high coefficients; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    /// Membership in `P_{d,K}`: monic of degree `d`, nonzero constant term and
    /// every coefficient bounded by `K` in absolute value.
    pub fn in_family(&self, d: usize, k: u64) -> bool {
        let bound = BigInt::from(k);
        self.degree() == Some(d)
            && self.is_monic()
            && !self.coeffs[0].is_zero()
            && self.coeffs.iter().all(|c| c.abs() <= bound)
    }

    /// Coefficients as `i64` when all of them fit.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(Signed::abs).max().unwrap_or_default()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.coeffs.iter().map(Signed::abs).sum()
    }

    pub fn l2_norm_squared(&self) -> BigInt {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Horner evaluation at an integer point.
    pub fn evaluate(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn evaluate_i64(&self, x: i64) -> BigInt {
        self.evaluate(&BigInt::from(x))
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `f(z^k)`.
    pub fn inflate(&self, k: usize) -> Self {
        assert!(k >= 1);
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Self::from_coeffs(coeffs)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Division by a monic polynomial: `self = g * q + r` with `deg r < deg g`.
    pub fn divrem(&self, g: &IntPolynomial) -> Result<(IntPolynomial, IntPolynomial)> {
        if !g.is_monic() {
            return Err(Error::NonMonicDivisor);
        }
        let dg = g.coeffs.len() - 1;
        if self.coeffs.len() <= dg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dg];
        for i in (0..quot.len()).rev() {
            let c = std::mem::take(&mut rem[i + dg]);
            if c.is_zero() {
                continue;
            }
            for (j, gj) in g.coeffs[..dg].iter().enumerate() {
                if !gj.is_zero() {
                    rem[i + j] -= &c * gj;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dg);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact quotient by a monic divisor, `None` when the remainder is nonzero.
    pub fn div_exact(&self, g: &IntPolynomial) -> Result<Option<IntPolynomial>> {
        let (q, r) = self.divrem(g)?;
        Ok(r.is_zero().then_some(q))
    }

    /// Whether the monic polynomial `g` divides `self`.
    pub fn is_divisible_by(&self, g: &IntPolynomial) -> Result<bool> {
        Ok(self.divrem(g)?.1.is_zero())
    }

    /// Pseudo-remainder `lc(g)^k * f mod g` over `Z`, where `k` counts the
    /// elimination steps (at most `deg f - deg g + 1`).
    pub fn pseudo_rem(&self, g: &IntPolynomial) -> IntPolynomial {
        assert!(!g.is_zero(), "pseudo-division by zero");
        let dg = g.coeffs.len() - 1;
        let lc = g.coeffs[dg].clone();
        let mut r = self.coeffs.clone();
        while r.len() > dg && !r.is_empty() {
            let top = r.len() - 1;
            let c = r[top].clone();
            let shift = top - dg;
            for a in r.iter_mut() {
                *a *= &lc;
            }
            for (j, gj) in g.coeffs.iter().enumerate() {
                r[shift + j] -= &c * gj;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Self::from_coeffs(r)
    }

    /// Gcd of the coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Greatest common divisor over `Z[z]` by the primitive remainder sequence,
    /// normalized to a primitive polynomial with positive leading coefficient.
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let content = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.coeffs.len() < b.coeffs.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.scale(&content)
    }

    /// Squarefree decomposition of a monic polynomial (Yun's algorithm):
    /// returns `(s_i, i)` with `self = prod s_i^i`, each `s_i` monic squarefree
    /// and pairwise coprime. Trivial factors are omitted.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(IntPolynomial, usize)>> {
        if !self.is_monic() {
            return Err(Error::InvalidInput(
                "squarefree decomposition expects a monic polynomial".into(),
            ));
        }
        if self.degree() == Some(0) {
            return Ok(Vec::new());
        }
        if self.squarefree_mod_small_prime() {
            return Ok(vec![(self.clone(), 1)]);
        }
        let df = self.derivative();
        let a0 = self.gcd(&df);
        let mut b = self.div_exact(&a0)?.expect("gcd divides f");
        let c = df.div_exact(&a0)?.expect("gcd divides f'");
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            let nb = b.div_exact(&a)?.expect("gcd divides b");
            let nc = d.div_exact(&a)?.expect("gcd divides d");
            d = &nc - &nb.derivative();
            b = nb;
            i += 1;
        }
        Ok(out)
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => {
                self.squarefree_mod_small_prime()
                    || self.gcd(&self.derivative()).degree() == Some(0)
            }
        }
    }

    /// Sufficient test: some small prime keeps the degree and leaves the
    /// reduction squarefree.
    fn squarefree_mod_small_prime(&self) -> bool {
        let n = self.degree();
        [3u64, 5, 7, 11, 13, 17, 19, 23].iter().any(|&p| {
            let fp = ModPolynomial::reduce(self, p);
            fp.degree() == n && fp.is_squarefree()
        })
    }

    /// Coefficients reduced into the symmetric range `(-m/2, m/2]`.
    pub fn symmetric_mod(&self, m: &BigInt) -> IntPolynomial {
        let half = m >> 1;
        Self::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| {
                    let r = c.mod_floor(m);
                    if r > half {
                        r - m
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: &BigInt) -> IntPolynomial {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.mod_floor(m)).collect())
    }
}

fn add_slices(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o += s;
    }
    out
}

fn schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn karatsuba(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.len() <= KARATSUBA_THRESHOLD || b.len() <= KARATSUBA_THRESHOLD {
        return schoolbook(a, b);
    }
    let half = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));
    let z0 = karatsuba(a0, b0);
    let z2 = karatsuba(a1, b1);
    let mut z1 = karatsuba(&add_slices(a0, a1), &add_slices(b0, b1));
    for (i, c) in z0.iter().enumerate() {
        z1[i] -= c;
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] -= c;
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in z1.into_iter().enumerate() {
        if i + half < out.len() {
            out[i + half] += c;
        } else {
            debug_assert!(c.is_zero());
        }
    }
    for (i, c) in z2.into_iter().enumerate() {
        out[i + 2 * half] += c;
    }
    out
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        IntPolynomial::from_coeffs(add_slices(&self.coeffs, &rhs.coeffs))
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut out = self.coeffs.clone();
        if out.len() < rhs.coeffs.len() {
            out.resize(rhs.coeffs.len(), BigInt::zero());
        }
        for (o, c) in out.iter_mut().zip(&rhs.coeffs) {
            *o -= c;
        }
        IntPolynomial::from_coeffs(out)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        IntPolynomial::from_coeffs(karatsuba(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPolynomial {
            type Output = IntPolynomial;
            fn $m(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&IntPolynomial> for IntPolynomial {
            type Output = IntPolynomial;
            fn $m(self, rhs: &IntPolynomial) -> IntPolynomial {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        -&self
    }
}

impl PartialOrd for IntPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by degree, then coefficients from the top down.
impl Ord for IntPolynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl From<Vec<i64>> for IntPolynomial {
    fn from(v: Vec<i64>) -> Self {
        Self::from_i64(&v)
    }
}
