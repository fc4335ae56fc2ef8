//! Cyclotomic polynomials `Q_n`, Euler's totient and its preimages, and the
//! folding of a polynomial modulo `z^n - 1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::intpoly::IntPolynomial;
use crate::primes;
use crate::Result;

/// Euler's totient via the factorization of `n`.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi is defined for n >= 1");
    primes::factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Totients of `0..=n` by a linear sieve (index 0 holds 0).
pub fn totient_sieve(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            for j in (i..=n).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    phi
}

/// Search limit for `phi(n) = l`: `phi(n) >= sqrt(n/2)` gives `n <= 2 l^2`.
pub fn inverse_phi_search_bound(l: u64) -> u64 {
    2 * l * l + 6
}

/// All `n` with `phi(n) = l`, sorted.
pub fn inverse_phi(l: u64) -> Vec<u64> {
    assert!(l >= 1);
    let bound = inverse_phi_search_bound(l);
    (1..=bound).filter(|&n| euler_phi(n) == l).collect()
}

/// Preimages for every `l` in `1..=max_l` from a single sieve pass.
pub fn inverse_phi_table(max_l: u64) -> BTreeMap<u64, Vec<u64>> {
    let bound = inverse_phi_search_bound(max_l) as usize;
    let phi = totient_sieve(bound);
    let mut out: BTreeMap<u64, Vec<u64>> = (1..=max_l).map(|l| (l, Vec::new())).collect();
    for (n, &v) in phi.iter().enumerate().skip(1) {
        if v <= max_l && (n as u64) <= inverse_phi_search_bound(v) {
            out.get_mut(&v).unwrap().push(n as u64);
        }
    }
    out
}

fn cache() -> &'static RwLock<HashMap<u64, Arc<IntPolynomial>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<IntPolynomial>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Q_n` by recursive exact division `(z^n - 1) / prod_{m | n, m < n} Q_m`,
/// memoized process-wide.
pub fn cyclotomic_poly(n: u64) -> Arc<IntPolynomial> {
    assert!(n >= 1, "cyclotomic_poly is defined for n >= 1");
    if let Some(q) = cache().read().unwrap().get(&n) {
        return q.clone();
    }
    let mut q = IntPolynomial::z_pow_minus_one(n as usize);
    let mut divs = primes::divisors(n);
    divs.sort_unstable();
    for m in divs.into_iter().filter(|&m| m < n) {
        let qm = cyclotomic_poly(m);
        q = q
            .div_exact(&qm)
            .expect("cyclotomic polynomials are monic")
            .expect("Q_m divides z^n - 1 for m | n");
    }
    let q = Arc::new(q);
    cache().write().unwrap().entry(n).or_insert(q).clone()
}

/// Eagerly built table of `Q_n` and `phi(n)` for `n <= max_n`. Immutable after
/// construction.
#[derive(Clone, Debug)]
pub struct CyclotomicTable {
    max_n: u64,
    polys: BTreeMap<u64, Arc<IntPolynomial>>,
    phi: BTreeMap<u64, u64>,
}

impl CyclotomicTable {
    pub fn build(max_n: u64) -> Self {
        let polys = (1..=max_n).map(|n| (n, cyclotomic_poly(n))).collect();
        let phi = (1..=max_n).map(|n| (n, euler_phi(n))).collect();
        Self { max_n, polys, phi }
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
    }

    pub fn poly(&self, n: u64) -> Option<&IntPolynomial> {
        self.polys.get(&n).map(|q| q.as_ref())
    }

    pub fn phi(&self, n: u64) -> Option<u64> {
        self.phi.get(&n).copied()
    }
}

/// `h(z) = sum_j A_j z^j` with `A_j` the sum of the coefficients `a_k` over
/// `k = j (mod n)`; congruent to `f` modulo `z^n - 1`.
pub fn fold_mod_zn(f: &IntPolynomial, n: usize) -> IntPolynomial {
    assert!(n >= 1);
    let mut folded = vec![BigInt::zero(); n.min(f.coeffs().len())];
    for (k, a) in f.coeffs().iter().enumerate() {
        folded[k % n] += a;
    }
    IntPolynomial::from_coeffs(folded)
}

/// Whether `Q_n` divides `f`, decided on the fold of `f` modulo `z^n - 1`.
pub fn divisible_by_cyclotomic(f: &IntPolynomial, n: u64) -> bool {
    let q = cyclotomic_poly(n);
    fold_mod_zn(f, n as usize)
        .is_divisible_by(&q)
        .expect("cyclotomic polynomials are monic")
}

/// Every `n` with `Q_n | f` and `phi(n) <= m_max`, sorted.
pub fn cyclotomic_divisors(f: &IntPolynomial, m_max: u64) -> Result<Vec<u64>> {
    if f.is_zero() {
        return Err(crate::Error::InvalidInput(
            "cyclotomic_divisors needs a nonzero polynomial".into(),
        ));
    }
    if m_max == 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<u64> = inverse_phi_table(m_max)
        .into_values()
        .flatten()
        .filter(|&n| divisible_by_cyclotomic(f, n))
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn totient_examples() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
        assert_eq!(euler_phi(12), 4);
        let by_gcd = (1..=12u64).filter(|&j| num_integer::gcd(j, 12) == 1).count();
        assert_eq!(by_gcd, 4);
        let sieve = totient_sieve(500);
        for n in 1..=500u64 {
            assert_eq!(sieve[n as usize], euler_phi(n));
        }
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(*cyclotomic_poly(1), p(&[-1, 1]));
        assert_eq!(*cyclotomic_poly(2), p(&[1, 1]));
        assert_eq!(*cyclotomic_poly(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(105).coeff(7), BigInt::from(-2));
    }

    #[test]
    fn inverse_phi_examples() {
        assert_eq!(inverse_phi(1), vec![1, 2]);
        assert_eq!(inverse_phi(3), Vec::<u64>::new());
        assert_eq!(inverse_phi(4), vec![5, 8, 10, 12]);
    }

    #[test]
    fn inverse_phi_table_matches_direct_scan() {
        let table = inverse_phi_table(64);
        for l in 1..=64u64 {
            assert_eq!(table[&l], inverse_phi(l), "l = {l}");
            for &n in &table[&l] {
                assert!(n <= 2 * l * l, "n = {n} exceeds 2 l^2 for l = {l}");
            }
        }
    }

    #[test]
    fn fold_examples() {
        assert_eq!(fold_mod_zn(&p(&[3, 2, 0, 0, 0, 1]), 2), p(&[3, 3]));
        let f = p(&[1, -2, 3]);
        assert_eq!(fold_mod_zn(&f, 7), f);
        for n in 1..10 {
            let zn = IntPolynomial::monomial(BigInt::from(1), n);
            assert_eq!(fold_mod_zn(&zn, n), IntPolynomial::one());
        }
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(cyclotomic_divisors(&p(&[-1, 0, 1]), 2).unwrap(), vec![1, 2]);
        assert_eq!(cyclotomic_divisors(&p(&[1, 2, 2, 1]), 2).unwrap(), vec![2, 3]);
        assert_eq!(cyclotomic_divisors(&p(&[1, 1, 1]), 1).unwrap(), Vec::<u64>::new());
        assert!(cyclotomic_divisors(&IntPolynomial::zero(), 3).is_err());
    }

    #[test]
    fn table_degrees() {
        let t = CyclotomicTable::build(60);
        for n in 1..=60 {
            assert_eq!(t.poly(n).unwrap().degree(), Some(t.phi(n).unwrap() as usize));
        }
        assert!(t.poly(61).is_none());
    }

    proptest! {
        #[test]
        fn fold_preserves_divisibility(
            c in prop::collection::vec(-3i64..=3, 1..120),
            n in 1u64..=50,
        ) {
            let mut c = c;
            c.push(1);
            let f = p(&c);
            let q = cyclotomic_poly(n);
            let direct = f.is_divisible_by(&q).unwrap();
            prop_assert_eq!(direct, divisible_by_cyclotomic(&f, n));
            let folded = fold_mod_zn(&f, n as usize);
            let zn = IntPolynomial::z_pow_minus_one(n as usize);
            let diff = &f - &folded;
            prop_assert!(diff.is_divisible_by(&zn).unwrap());
        }

        #[test]
        fn planted_cyclotomic_factor_is_found(
            c in prop::collection::vec(-3i64..=3, 0..30),
            n in 1u64..=40,
        ) {
            let mut c = c;
            c.push(1);
            let f = &p(&c) * cyclotomic_poly(n).as_ref();
            let divs = cyclotomic_divisors(&f, euler_phi(n)).unwrap();
            prop_assert!(divs.contains(&n));
        }
    }
}
