//! Certified complex roots by Aberth-Ehrlich iteration.
//!
//! Approximations are certified with Weierstrass inclusion discs: for
//! `p = lc * prod (z - zeta_j)` and pairwise distinct `z_i`, the discs
//! `D(z_i, n |W_i|)` with `W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`
//! cover the roots, and a component of `k` discs holds exactly `k` roots. When
//! the discs are pairwise disjoint each holds one root. Rounding in evaluating
//! `W_i` is bounded and added to the radius.
//!
//! The iteration runs in `f64` first and then in fixed-point complex arithmetic
//! with 106, 212 and 424 fractional bits until the radii meet the tolerance.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, IntPolynomial, Result};

const PRECISIONS: [u32; 3] = [106, 212, 424];
const EPS: f64 = f64::EPSILON;

/// Roots with multiplicity, each paired with a certified error radius.
pub fn certified_roots(g: &IntPolynomial, tol: f64) -> Result<Vec<(Complex64, f64)>> {
    roots_with(g, Tolerance { tol, relative: false })
}

/// Roots whose radii satisfy `r <= tol * max(1, |z|)`.
pub(crate) fn certified_roots_relative(g: &IntPolynomial, tol: f64) -> Result<Vec<(Complex64, f64)>> {
    roots_with(g, Tolerance { tol, relative: true })
}

#[derive(Clone, Copy)]
struct Tolerance {
    tol: f64,
    relative: bool,
}

impl Tolerance {
    fn accepts(&self, r: f64, z: Complex64) -> bool {
        let scale = if self.relative { z.norm().max(1.0) } else { 1.0 };
        r <= self.tol * scale
    }
}

fn roots_with(g: &IntPolynomial, tol: Tolerance) -> Result<Vec<(Complex64, f64)>> {
    let deg = g
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::InvalidInput("root finding needs degree >= 1".into()))?;
    if !(tol.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let mut out = Vec::with_capacity(deg);
    for (part, mult) in squarefree_parts(g) {
        for (z, r) in squarefree_roots(&part, tol)? {
            out.extend(std::iter::repeat_n((z, r), mult));
        }
    }
    Ok(out)
}

/// Exact quotient over `Z`, `None` if `g` does not divide `f`.
pub(crate) fn exact_quotient(f: &IntPolynomial, g: &IntPolynomial) -> Option<IntPolynomial> {
    let dg = g.degree()?;
    let lc = g.leading().unwrap();
    let mut rem: Vec<BigInt> = f.coeffs().to_vec();
    if rem.len() <= dg {
        return rem.is_empty().then(IntPolynomial::zero);
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dg];
    for i in (0..quot.len()).rev() {
        let top = std::mem::take(&mut rem[i + dg]);
        if top.is_zero() {
            continue;
        }
        if !(&top % lc).is_zero() {
            return None;
        }
        let c = &top / lc;
        for (j, gj) in g.coeffs()[..dg].iter().enumerate() {
            rem[i + j] -= &c * gj;
        }
        quot[i] = c;
    }
    rem.iter()
        .all(Zero::is_zero)
        .then(|| IntPolynomial::from_coeffs(quot))
}

/// Yun's decomposition over `Z` for arbitrary leading coefficient; parts are
/// primitive.
fn squarefree_parts(g: &IntPolynomial) -> Vec<(IntPolynomial, usize)> {
    let f = g.primitive_part();
    let df = f.derivative();
    let b0 = f.gcd(&df);
    if b0.degree() == Some(0) {
        return vec![(f, 1)];
    }
    let mut c = exact_quotient(&f, &b0).expect("gcd divides f");
    let mut d = &exact_quotient(&df, &b0).expect("gcd divides f'") - &c.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while c.degree().unwrap_or(0) > 0 {
        let a = c.gcd(&d);
        let nc = exact_quotient(&c, &a).expect("gcd divides c");
        let nd = exact_quotient(&d, &a).expect("gcd divides d");
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        d = &nd - &nc.derivative();
        c = nc;
        i += 1;
    }
    out
}

fn squarefree_roots(f: &IntPolynomial, tol: Tolerance) -> Result<Vec<(Complex64, f64)>> {
    let n = f.degree().unwrap();
    if n == 1 {
        // a1 z + a0: the rational root, rounded once
        let z = -f.coeff(0).to_f64().unwrap() / f.coeff(1).to_f64().unwrap();
        return Ok(vec![(Complex64::new(z, 0.0), z.abs() * EPS + f64::MIN_POSITIVE)]);
    }
    let coeffs: Vec<f64> = f.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NoConvergence { degree: n });
    }
    let mut zs = aberth_f64(&coeffs);
    if let Some(radii) = certify_f64(&coeffs, &zs, tol) {
        return Ok(zs.into_iter().zip(radii).collect());
    }
    for prec in PRECISIONS {
        let ctx = Fixed::new(prec, f);
        let mut fz: Vec<Cx> = zs.iter().map(|z| ctx.from_c64(*z)).collect();
        ctx.aberth(&mut fz);
        if let Some(radii) = ctx.certify(&fz, tol) {
            return Ok(fz.iter().map(|z| ctx.to_c64(z)).zip(radii).collect());
        }
        zs = fz.iter().map(|z| ctx.to_c64(z)).collect();
    }
    Err(Error::NoConvergence { degree: n })
}

fn initial_points(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lc = coeffs[n];
    let center = -coeffs[n - 1] / (n as f64 * lc);
    // Fujiwara-type radius for the shifted polynomial is overkill; the plain
    // bound on |roots| is adequate as a starting circle.
    let radius = (0..n)
        .map(|k| (coeffs[k] / lc).abs().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    let mut bound = 0.0;
    let az = z.norm();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * az + c.abs();
    }
    (p, dp, bound)
}

fn aberth_f64(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let mut zs = initial_points(coeffs);
    let mut settled = 0;
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp, bound) = horner(coeffs, zs[i]);
            if p.norm() <= 4.0 * n as f64 * EPS * bound {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (zs[i] - zs[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                zs[i] -= w;
                max_step = max_step.max(w.norm() / zs[i].norm().max(1.0));
            } else {
                zs[i] += Complex64::new(1e-8, 1e-8);
                max_step = 1.0;
            }
        }
        if max_step < 4.0 * EPS {
            settled += 1;
            if settled >= 2 {
                break;
            }
        } else {
            settled = 0;
        }
    }
    zs
}

fn disjoint(zs: &[Complex64], radii: &[f64]) -> bool {
    (0..zs.len()).all(|i| ((i + 1)..zs.len()).all(|j| (zs[i] - zs[j]).norm() > radii[i] + radii[j]))
}

fn certify_f64(coeffs: &[f64], zs: &[Complex64], tol: Tolerance) -> Option<Vec<f64>> {
    let n = coeffs.len() - 1;
    let nf = n as f64;
    let lc = coeffs[n];
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let (p, _, bound) = horner(coeffs, zs[i]);
        let p_hi = p.norm() + (8.0 * nf + 2.0) * EPS * bound;
        let den: Complex64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| zs[i] - zs[j])
            .product::<Complex64>()
            * lc;
        let den_lo = den.norm() * (1.0 - 8.0 * nf * EPS);
        if !(den_lo > 0.0) || !den_lo.is_finite() {
            return None;
        }
        let r = nf * p_hi / den_lo * (1.0 + 1e-12) + zs[i].norm() * EPS;
        if !tol.accepts(r, zs[i]) {
            return None;
        }
        radii.push(r);
    }
    disjoint(zs, &radii).then_some(radii)
}

#[derive(Clone, Debug)]
struct Cx {
    re: BigInt,
    im: BigInt,
}

/// Fixed-point complex arithmetic with `prec` fractional bits.
struct Fixed {
    prec: u32,
    coeffs: Vec<BigInt>,
    scaled: Vec<BigInt>,
}

fn big_to_f64(x: &BigInt, prec: u32) -> f64 {
    // shift down first so the conversion never overflows
    let shift = prec.saturating_sub(60);
    (x >> shift).to_f64().unwrap() * 2f64.powi(-((prec - shift) as i32))
}

impl Fixed {
    fn new(prec: u32, f: &IntPolynomial) -> Self {
        Self {
            prec,
            coeffs: f.coeffs().to_vec(),
            scaled: f.coeffs().iter().map(|c| c << prec as usize).collect(),
        }
    }

    fn from_c64(&self, z: Complex64) -> Cx {
        let scale = 2f64.powi(52);
        let conv = |x: f64| {
            let m = BigInt::from((x * scale).round() as i128);
            (m << self.prec as usize) >> 52usize
        };
        Cx { re: conv(z.re), im: conv(z.im) }
    }

    fn to_c64(&self, z: &Cx) -> Complex64 {
        Complex64::new(big_to_f64(&z.re, self.prec), big_to_f64(&z.im, self.prec))
    }

    fn norm(&self, z: &Cx) -> f64 {
        self.to_c64(z).norm()
    }

    fn add(&self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: &a.re + &b.re, im: &a.im + &b.im }
    }

    fn sub(&self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: &a.re - &b.re, im: &a.im - &b.im }
    }

    fn mul(&self, a: &Cx, b: &Cx) -> Cx {
        let p = self.prec as usize;
        Cx {
            re: (&a.re * &b.re - &a.im * &b.im) >> p,
            im: (&a.re * &b.im + &a.im * &b.re) >> p,
        }
    }

    fn div(&self, a: &Cx, b: &Cx) -> Option<Cx> {
        let den = &b.re * &b.re + &b.im * &b.im;
        if den.is_zero() {
            return None;
        }
        let p = self.prec as usize;
        let re = ((&a.re * &b.re + &a.im * &b.im) << p) / &den;
        let im = ((&a.im * &b.re - &a.re * &b.im) << p) / &den;
        Some(Cx { re, im })
    }

    fn one(&self) -> Cx {
        Cx { re: BigInt::from(1) << self.prec as usize, im: BigInt::zero() }
    }

    fn horner(&self, z: &Cx) -> (Cx, Cx) {
        let mut p = Cx { re: BigInt::zero(), im: BigInt::zero() };
        let mut dp = p.clone();
        for c in self.scaled.iter().rev() {
            dp = self.add(&self.mul(&dp, z), &p);
            p = self.mul(&p, z);
            p.re += c;
        }
        (p, dp)
    }

    fn aberth(&self, zs: &mut [Cx]) {
        let n = zs.len();
        let target = 2f64.powi(-(self.prec as i32) + 8);
        for _ in 0..200 {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let (p, dp) = self.horner(&zs[i]);
                let Some(ratio) = self.div(&p, &dp) else { continue };
                let mut s = Cx { re: BigInt::zero(), im: BigInt::zero() };
                for j in (0..n).filter(|&j| j != i) {
                    if let Some(inv) = self.div(&self.one(), &self.sub(&zs[i], &zs[j])) {
                        s = self.add(&s, &inv);
                    }
                }
                let den = self.sub(&self.one(), &self.mul(&ratio, &s));
                let Some(w) = self.div(&ratio, &den) else { continue };
                zs[i] = self.sub(&zs[i], &w);
                max_step = max_step.max(self.norm(&w) / self.norm(&zs[i]).max(1.0));
            }
            if max_step < target {
                break;
            }
        }
    }

    fn certify(&self, zs: &[Cx], tol: Tolerance) -> Option<Vec<f64>> {
        let n = zs.len();
        let nf = n as f64;
        let ulp = 2f64.powi(-(self.prec as i32));
        let lc = self.coeffs.last().unwrap().abs().to_f64().unwrap();
        let mut radii = Vec::with_capacity(n);
        let centers: Vec<Complex64> = zs.iter().map(|z| self.to_c64(z)).collect();
        for i in 0..n {
            let (p, _) = self.horner(&zs[i]);
            let zmax = self.norm(&zs[i]).max(1.0) * (1.0 + 1e-12);
            let p_hi = self.norm(&p) * (1.0 + 1e-12) + 4.0 * (nf + 1.0) * ulp * zmax.powi(n as i32);
            let mut den = self.one();
            let mut growth = 1.0f64;
            for j in (0..n).filter(|&j| j != i) {
                let diff = self.sub(&zs[i], &zs[j]);
                growth *= self.norm(&diff).max(1.0) * (1.0 + 1e-12);
                den = self.mul(&den, &diff);
            }
            let den_err = 4.0 * nf * ulp * growth;
            let den_lo = (self.norm(&den) * (1.0 - 1e-12) - den_err) * lc;
            if !(den_lo > 0.0) {
                return None;
            }
            // radius about the f64 center: certified disc plus the rounding of the center
            let r = nf * p_hi / den_lo * (1.0 + 1e-12) + centers[i].norm() * EPS;
            if !tol.accepts(r, centers[i]) {
                return None;
            }
            radii.push(r);
        }
        disjoint(&centers, &radii).then_some(radii)
    }
}
