//! Mahler measure with certified error, exact detection of cyclotomic
//! products, Dobrowolski's lower-bound exponent and its prime window, and the
//! polynomial whose roots are the `p`-th powers of a given polynomial's roots.

mod roots;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use roots::certified_roots;
use roots::certified_roots_relative;

use crate::cyclotomic::{cyclotomic_poly, inverse_phi_table};
use crate::{primes, Error, IntPolynomial, Result};

/// Default constant in `lambda_m = c (log log m / log m)^3`.
pub const C_DEFAULT: f64 = 1.0 / 1200.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerReport {
    /// Roots with multiplicity and their certified radii.
    pub roots: Vec<(Complex64, f64)>,
    pub measure: f64,
    pub measure_error: f64,
    pub is_cyclotomic_product: bool,
}

impl MahlerReport {
    /// `1 - err <= M(g) <= sum |b_j| + err`.
    pub fn jensen_sandwich_holds(&self, g: &IntPolynomial) -> bool {
        let upper = g.l1_norm().to_f64().unwrap_or(f64::INFINITY);
        1.0 - self.measure_error <= self.measure && self.measure <= upper + self.measure_error
    }
}

/// Splits a monic `g` with `g(0) != 0` into the cyclotomic factors it contains,
/// as `(n, multiplicity)` sorted by `n`, and the remaining cofactor.
pub fn cyclotomic_part(g: &IntPolynomial) -> (Vec<(u64, usize)>, IntPolynomial) {
    let m = g.degree().unwrap_or(0) as u64;
    let mut rest = g.clone();
    let mut found = Vec::new();
    if m == 0 {
        return (found, rest);
    }
    let mut candidates: Vec<u64> = inverse_phi_table(m).into_values().flatten().collect();
    candidates.sort_unstable();
    for n in candidates {
        let q = cyclotomic_poly(n);
        if q.degree() > rest.degree() {
            continue;
        }
        let mut mult = 0;
        while let Some(next) = rest.div_exact(&q).expect("cyclotomic polynomials are monic") {
            rest = next;
            mult += 1;
        }
        if mult > 0 {
            found.push((n, mult));
        }
    }
    (found, rest)
}

/// Whether a monic `g` with `g(0) != 0` is a product of cyclotomic
/// polynomials, decided by exact division.
pub fn is_cyclotomic_product(g: &IntPolynomial) -> bool {
    if !g.is_monic() || g.constant_term().is_zero() {
        return false;
    }
    cyclotomic_part(g).1.is_one()
}

/// `M(g) = prod max(1, |z_j|)` with error at most `tol`, or a few units in the
/// last place of `M` times the degree when that is larger (the value is a double).
///
/// Cyclotomic factors are divided out exactly and contribute exactly 1; the
/// remaining roots are certified and their radii propagated to the error.
pub fn mahler_measure(g: &IntPolynomial, tol: f64) -> Result<MahlerReport> {
    if !g.is_monic() {
        return Err(Error::InvalidInput("Mahler measure expects a monic polynomial".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let shift = g.coeffs().iter().take_while(|c| c.is_zero()).count();
    let core = IntPolynomial::from_coeffs(g.coeffs()[shift..].to_vec());
    let (cyc, rest) = cyclotomic_part(&core);
    let is_cyc = shift == 0 && rest.is_one();

    let mut roots: Vec<(Complex64, f64)> = vec![(Complex64::zero(), 0.0); shift];
    for (n, mult) in &cyc {
        let q = cyclotomic_poly(*n);
        if q.degree() == Some(1) {
            let z = -q.coeff(0).to_f64().unwrap();
            roots.extend(std::iter::repeat_n((Complex64::new(z, 0.0), 0.0), *mult));
        } else {
            let r = certified_roots(&q, tol)?;
            for _ in 0..*mult {
                roots.extend(r.iter().copied());
            }
        }
    }
    if rest.is_one() {
        return Ok(MahlerReport { roots, measure: 1.0, measure_error: 0.0, is_cyclotomic_product: is_cyc });
    }
    let m = rest.degree().unwrap() as f64;
    let l1 = rest.l1_norm().to_f64().unwrap_or(f64::MAX);
    // relative radii r_j <= rho max(1,|z_j|) perturb M by a factor of at most (1 + rho)^m
    let root_tol = (tol / (2.0 * m * l1)).max(8.0 * f64::EPSILON);
    let rest_roots = certified_roots_relative(&rest, root_tol)?;
    let (mut measure, mut upper, mut lower) = (1.0f64, 1.0f64, 1.0f64);
    for (z, r) in &rest_roots {
        let a = z.norm();
        measure *= a.max(1.0);
        upper *= (a + r).max(1.0);
        lower *= (a - r).max(1.0);
    }
    // slack for the floating products themselves
    let slack = measure * 4.0 * m * f64::EPSILON;
    let measure_error = (upper - measure).max(measure - lower) + slack;
    roots.extend(rest_roots);
    Ok(MahlerReport { roots, measure, measure_error, is_cyclotomic_product: false })
}

/// `c (log log m / log m)^3` for `m >= 3`.
pub fn dobrowolski_lambda(m: u64, c: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::DomainError(format!("lambda_m needs m >= 3, got {m}")));
    }
    let l = (m as f64).ln();
    Ok(c * (l.ln() / l).powi(3))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DobrowolskiContext {
    pub c: f64,
    pub m: u64,
    pub lambda: f64,
    pub prime_window: (f64, f64),
    pub prime: Option<u64>,
    pub diagnostic: Option<String>,
}

/// Smallest prime `p` with `lo < p < hi`, if any fits in `u64`.
pub fn first_prime_in_open_window(lo: f64, hi: f64) -> Option<u64> {
    if !(lo < hi) || lo >= u64::MAX as f64 {
        return None;
    }
    let start = if lo < 0.0 { 0 } else { lo.floor() as u64 + 1 };
    (start..)
        .take_while(|&n| (n as f64) < hi)
        .find(|&n| primes::is_prime(n))
}

/// The window `log(2Kd+1)/lambda < p < 2 log(2Kd+1)/lambda` with `lambda`
/// taken at `m = floor(m0)`, and the smallest prime inside it.
pub fn dobrowolski_prime(k: u64, d: u64, m0: f64, c: f64) -> Result<DobrowolskiContext> {
    if d < 2 || k < 1 || m0 < 3.0 {
        return Err(Error::DomainError("need d >= 2, K >= 1, m0 >= 3".into()));
    }
    let m = m0.floor() as u64;
    let lambda = dobrowolski_lambda(m, c)?;
    let lo = ((2 * k * d + 1) as f64).ln() / lambda;
    let hi = 2.0 * lo;
    let prime = first_prime_in_open_window(lo, hi);
    let diagnostic = prime
        .is_none()
        .then(|| format!("no prime in ({lo}, {hi})"));
    Ok(DobrowolskiContext { c, m, lambda, prime_window: (lo, hi), prime, diagnostic })
}

/// `prod_j (w - z_j^p)` for monic `g` with roots `z_j`, computed as the
/// characteristic polynomial of multiplication by `z^p` on `Z[z]/(g)`.
pub fn power_roots_poly(g: &IntPolynomial, p: u32) -> Result<IntPolynomial> {
    if !g.is_monic() {
        return Err(Error::InvalidInput("power_roots_poly expects a monic polynomial".into()));
    }
    if p == 0 {
        return Err(Error::InvalidInput("power must be positive".into()));
    }
    let m = g.degree().unwrap();
    if m == 0 {
        return Ok(IntPolynomial::one());
    }
    let zp = IntPolynomial::monomial(BigInt::one(), p as usize).divrem(g)?.1;
    // column i holds z^i * z^p mod g
    let mut cols = Vec::with_capacity(m);
    let mut v = zp;
    for _ in 0..m {
        cols.push((0..m).map(|r| v.coeff(r)).collect::<Vec<_>>());
        v = (&v * &IntPolynomial::z()).divrem(g)?.1;
    }
    let a: Vec<Vec<BigInt>> = (0..m).map(|r| (0..m).map(|c| cols[c][r].clone()).collect()).collect();
    Ok(charpoly(&a))
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// Characteristic polynomial `det(w I - A)` by Faddeev-LeVerrier; the divisions
/// by `k` are exact over `Z`.
fn charpoly(a: &[Vec<BigInt>]) -> IntPolynomial {
    let n = a.len();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        let mut am = matmul(a, &mk);
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        mk = am;
        let amk = matmul(a, &mk);
        let trace: BigInt = (0..n).map(|i| amk[i][i].clone()).sum();
        let q = -trace / BigInt::from(k);
        c[n - k] = q;
    }
    IntPolynomial::from_coeffs(c)
}

/// One-sided empirical check `M(g) >= exp(lambda_m)` for a monic
/// noncyclotomic-product `g` of degree `m >= 3`; `None` when not applicable.
pub fn dobrowolski_holds(g: &IntPolynomial, c: f64, tol: f64) -> Result<Option<bool>> {
    let m = g.degree().unwrap_or(0) as u64;
    if m < 3 || g.constant_term().is_zero() || is_cyclotomic_product(g) {
        return Ok(None);
    }
    let rep = mahler_measure(g, tol)?;
    Ok(Some(rep.measure + rep.measure_error >= dobrowolski_lambda(m, c)?.exp()))
}

/// `sum_j |b_j|`, the upper end of the Jensen sandwich.
pub fn jensen_upper(g: &IntPolynomial) -> BigInt {
    g.coeffs().iter().map(|c| c.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::euler_phi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    fn random_monic(rng: &mut ChaCha8Rng) -> IntPolynomial {
        let deg = rng.random_range(1..=8);
        let mut c: Vec<i64> = (0..deg).map(|_| rng.random_range(-5..=5)).collect();
        if c[0] == 0 {
            c[0] = 1;
        }
        c.push(1);
        p(&c)
    }

    #[test]
    fn measure_examples() {
        let r = mahler_measure(&p(&[-2, 1]), 1e-9).unwrap();
        assert!((r.measure - 2.0).abs() <= 1e-9);
        let r = mahler_measure(&p(&[-1, -1, 1]), 1e-9).unwrap();
        assert!((r.measure - 1.618_033_988_749_895).abs() <= 1e-9);
        assert!(r.measure_error <= 1e-9);
        assert!(!r.is_cyclotomic_product);
    }

    #[test]
    fn cyclotomic_measure_is_one() {
        for n in (1..=200u64).filter(|&n| euler_phi(n) <= 32) {
            let r = mahler_measure(&cyclotomic_poly(n), 1e-9).unwrap();
            assert_eq!((r.measure, r.measure_error), (1.0, 0.0), "n = {n}");
            assert!(r.is_cyclotomic_product);
            assert_eq!(r.roots.len() as u64, euler_phi(n));
        }
    }

    #[test]
    fn cyclotomic_product_examples() {
        assert!(is_cyclotomic_product(&p(&[1, 0, 1])));
        assert!(is_cyclotomic_product(&p(&[1, 1]).pow(2)));
        assert!(!is_cyclotomic_product(&p(&[-1, -1, 1])));
        let (found, rest) = cyclotomic_part(&(&p(&[1, 1]).pow(2) * &p(&[-1, -1, 1])));
        assert_eq!(found, vec![(2, 2)]);
        assert_eq!(rest, p(&[-1, -1, 1]));
    }

    #[test]
    fn lehmer_polynomial() {
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let r = mahler_measure(&lehmer, 1e-9).unwrap();
        assert!((r.measure - 1.176_280_818_259_917).abs() <= 1e-9);
        assert!(!is_cyclotomic_product(&lehmer));
    }

    #[test]
    fn lambda_examples() {
        assert!((dobrowolski_lambda(3, 1.0).unwrap() - 6.273e-4).abs() < 1e-6);
        assert_eq!(dobrowolski_lambda(7, 0.0).unwrap(), 0.0);
        assert!((dobrowolski_lambda(10, C_DEFAULT).unwrap() - 3.960e-5).abs() < 1e-7);
        assert!(matches!(dobrowolski_lambda(2, 1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn prime_window_examples() {
        assert_eq!(first_prime_in_open_window(1.5, 2.5), Some(2));
        assert_eq!(first_prime_in_open_window(10.0, 20.0), Some(11));
        assert_eq!(first_prime_in_open_window(114.0, 126.0), None);
        // c chosen so that the window is (10, 20)
        let (k, d, m0) = (1u64, 100u64, 5.0);
        let c = ((2 * k * d + 1) as f64).ln() / (10.0 * dobrowolski_lambda(5, 1.0).unwrap());
        let ctx = dobrowolski_prime(k, d, m0, c).unwrap();
        assert!((ctx.prime_window.0 - 10.0).abs() < 1e-9);
        assert_eq!(ctx.prime, Some(11));
        let ctx = dobrowolski_prime(1, 1000, 4.0, C_DEFAULT).unwrap();
        let p = ctx.prime.unwrap();
        assert!(ctx.prime_window.0 < p as f64 && (p as f64) < ctx.prime_window.1);
    }

    #[test]
    fn power_poly_examples() {
        assert_eq!(power_roots_poly(&p(&[-2, 1]), 3).unwrap(), p(&[-8, 1]));
        assert_eq!(power_roots_poly(&p(&[-2, 0, 1]), 2).unwrap(), p(&[-2, 1]).pow(2));
        assert_eq!(power_roots_poly(&p(&[1, 0, 1]), 2).unwrap(), p(&[1, 1]).pow(2));
    }

    #[test]
    fn power_poly_square_matches_graeffe() {
        // g_2(z^2) = (-1)^m g(z) g(-z)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let g = random_monic(&mut rng);
            let m = g.degree().unwrap();
            let neg: Vec<BigInt> = g
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect();
            let mut prod = &g * &IntPolynomial::from_coeffs(neg);
            if m % 2 == 1 {
                prod = -prod;
            }
            assert_eq!(power_roots_poly(&g, 2).unwrap().inflate(2), prod);
        }
    }

    #[test]
    fn random_suite_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let g = random_monic(&mut rng);
            let rep = mahler_measure(&g, 1e-10).unwrap_or_else(|e| panic!("{g}: {e}"));
            assert!(rep.jensen_sandwich_holds(&g), "{g}");
            let near_one = (rep.measure - 1.0).abs() <= 1e-8;
            if !g.constant_term().is_zero() {
                assert_eq!(is_cyclotomic_product(&g), near_one, "{g}");
            }
            for pw in [2u32, 3, 5] {
                let gp = power_roots_poly(&g, pw).unwrap();
                let rp = mahler_measure(&gp, 1e-10).unwrap_or_else(|e| panic!("{gp}: {e}"));
                let expect = rep.measure.powi(pw as i32);
                let rel = (rp.measure - expect).abs() / expect;
                assert!(rel <= 1e-8, "{g} p={pw}: {} vs {expect}", rp.measure);
            }
            if let Some(ok) = dobrowolski_holds(&g, C_DEFAULT, 1e-10).unwrap() {
                assert!(ok, "{g}");
            }
        }
    }
}
