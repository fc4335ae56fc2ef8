//! Low-degree factor detection, irreducibility testing and exhaustive
//! censuses of `P_{d,K}` (monic, degree `d`, coefficients in `[-K, K]`,
//! nonzero constant term).

mod census;
pub mod hensel;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use census::{census, classify_small, family_size, member, CensusMode, CensusResult, CENSUS_LIMIT};

use crate::{primes, Error, IntPolynomial, ModPolynomial, Result};

/// Good primes consulted by the degree-pattern test and by prime selection.
pub const PATTERN_PRIMES: usize = 5;
const PRIME_SCAN_LIMIT: usize = 400;
/// Largest degree accepted by [`is_irreducible`].
pub const MAX_DEGREE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMethod {
    IntegerRoots,
    LiftRecombine,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationResult {
    pub input: IntPolynomial,
    /// Monic irreducible factors with multiplicities, sorted by degree then coefficients.
    pub factors: Vec<(IntPolynomial, usize)>,
    pub method: FactorMethod,
    /// Every irreducible factor of degree up to this value is listed.
    pub certified_complete_to_degree: usize,
}

impl FactorizationResult {
    pub fn product(&self) -> IntPolynomial {
        self.factors
            .iter()
            .fold(IntPolynomial::one(), |acc, (g, e)| &acc * &g.pow(*e as u32))
    }

    /// Whether dividing the input by each factor to its multiplicity is exact.
    pub fn is_sound(&self) -> bool {
        let mut rest = self.input.clone();
        for (g, e) in &self.factors {
            for _ in 0..*e {
                match rest.div_exact(g) {
                    Ok(Some(q)) => rest = q,
                    _ => return false,
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrreducibilityCertificate {
    DegreePattern,
    FullFactorization,
}

fn check_family_input(f: &IntPolynomial) -> Result<usize> {
    if !f.is_monic() {
        return Err(Error::InvalidInput("expected a monic polynomial".into()));
    }
    if f.constant_term().is_zero() {
        return Err(Error::InvalidInput("constant term must be nonzero".into()));
    }
    match f.degree() {
        Some(d) if d >= 1 => Ok(d),
        _ => Err(Error::InvalidInput("degree must be at least 1".into())),
    }
}

/// Candidate integer roots: divisors of `a0` bounded by `1 + max |a_i|`.
fn root_candidates(f: &IntPolynomial) -> Option<Vec<BigInt>> {
    let a0 = f.constant_term().abs().to_u64()?;
    if a0 >= 1 << 40 {
        return None;
    }
    let bound = f.max_abs_coeff() + 1u32;
    let mut divs = primes::divisors(a0);
    divs.sort_unstable();
    Some(
        divs.into_iter()
            .map(BigInt::from)
            .take_while(|r| r <= &bound)
            .flat_map(|r| [-&r, r])
            .collect(),
    )
}

/// All integer roots of a monic `f` with `f(0) != 0`, sorted.
pub fn integer_roots(f: &IntPolynomial) -> Result<Vec<BigInt>> {
    check_family_input(f)?;
    let mut roots = match root_candidates(f) {
        Some(cands) => cands.into_iter().filter(|r| f.evaluate(r).is_zero()).collect(),
        None => lift_recombine(f, 1)?
            .into_iter()
            .map(|g| -g.constant_term())
            .collect::<Vec<_>>(),
    };
    roots.sort();
    roots.dedup();
    Ok(roots)
}

fn linear(r: &BigInt) -> IntPolynomial {
    IntPolynomial::from_coeffs(vec![-r, BigInt::one()])
}

fn multiplicity(f: &IntPolynomial, g: &IntPolynomial) -> usize {
    let mut rest = f.clone();
    let mut e = 0;
    while let Ok(Some(q)) = rest.div_exact(g) {
        rest = q;
        e += 1;
    }
    e
}

/// First `count` odd primes `p` for which `f mod p` is squarefree of full degree.
fn good_primes(f: &IntPolynomial, count: usize) -> Vec<(u64, ModPolynomial)> {
    let n = f.degree().unwrap();
    primes::odd_primes()
        .take(PRIME_SCAN_LIMIT)
        .filter_map(|p| {
            let fp = ModPolynomial::reduce(f, p);
            (fp.degree() == Some(n) && fp.is_squarefree()).then_some((p, fp))
        })
        .take(count)
        .collect()
}

/// Irreducible factors of degree `<= m_max` of a monic squarefree `f`, by
/// factoring modulo the good prime with fewest factors among the first five,
/// lifting past twice the Landau-Mignotte bound and recombining.
fn lift_recombine(f: &IntPolynomial, m_max: usize) -> Result<Vec<IntPolynomial>> {
    let n = f.degree().unwrap();
    if n == 1 {
        return Ok(vec![f.clone()]);
    }
    let candidates = good_primes(f, PATTERN_PRIMES);
    let cap = m_max.min(n - 1);
    if cap < 128 && !candidates.is_empty() {
        let mask = (u128::MAX >> (127 - cap)) & !1;
        let common = candidates.iter().fold(mask, |acc, (_, fp)| {
            acc & fp
                .low_factor_degrees(cap)
                .into_iter()
                .fold(1u128, |bits, deg| (bits | (bits << deg)) & (mask | 1))
        });
        if common == 0 {
            return Ok(if n <= m_max { vec![f.clone()] } else { Vec::new() });
        }
    }
    let (p, fp) = candidates
        .into_iter()
        .min_by_key(|(_, fp)| fp.factor_degrees().len())
        .ok_or_else(|| Error::InvalidInput("no good prime found; input not squarefree?".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let factors = fp.factor_squarefree(&mut rng);
    if factors.len() == 1 {
        return Ok(if n <= m_max { vec![f.clone()] } else { Vec::new() });
    }
    let bound = hensel::landau_mignotte(f, m_max.min(n));
    let steps = hensel::lift_steps(p, &bound);
    let lifted = hensel::multifactor_lift(f, &factors, steps);
    let modulus = BigInt::from(p).pow(steps);
    hensel::recombine(f, lifted, &modulus, m_max)
}

/// Complete list of irreducible factors of degree at most `m_max`.
pub fn low_degree_factors(f: &IntPolynomial, m_max: usize) -> Result<FactorizationResult> {
    let d = check_family_input(f)?;
    if m_max < 1 || m_max > d {
        return Err(Error::InvalidInput(format!("m_max must lie in [1, {d}]")));
    }
    let mut factors: Vec<(IntPolynomial, usize)> = Vec::new();
    let method = if m_max == 1 {
        for r in integer_roots(f)? {
            let g = linear(&r);
            let e = multiplicity(f, &g);
            factors.push((g, e));
        }
        FactorMethod::IntegerRoots
    } else {
        for (part, e) in f.squarefree_decomposition()? {
            for g in lift_recombine(&part, m_max)? {
                factors.push((g, e));
            }
        }
        FactorMethod::LiftRecombine
    };
    factors.sort();
    let mut out = FactorizationResult {
        input: f.clone(),
        factors,
        method,
        certified_complete_to_degree: m_max,
    };
    if out.product() == *f {
        out.certified_complete_to_degree = d;
    }
    Ok(out)
}

/// Full factorization into monic irreducibles.
pub fn factorize(f: &IntPolynomial) -> Result<FactorizationResult> {
    let d = check_family_input(f)?;
    low_degree_factors(f, d)
}

/// Achievable factor-degree subset sums of a squarefree `f mod p`, as a bitset.
pub(crate) fn degree_pattern(fp: &ModPolynomial) -> u128 {
    fp.factor_degrees()
        .into_iter()
        .fold(1u128, |acc, deg| acc | (acc << deg))
}

/// Irreducibility of a monic `f` with `f(0) != 0` and degree at most 64.
pub fn is_irreducible(f: &IntPolynomial) -> Result<(bool, IrreducibilityCertificate)> {
    let d = check_family_input(f)?;
    if d > MAX_DEGREE {
        return Err(Error::InvalidInput(format!("degree {d} exceeds {MAX_DEGREE}")));
    }
    let trivial = 1u128 | (1u128 << d);
    if f.is_squarefree() {
        let mut common = u128::MAX >> (127 - d);
        for (_, fp) in good_primes(f, PATTERN_PRIMES) {
            common &= degree_pattern(&fp);
            if common == trivial {
                return Ok((true, IrreducibilityCertificate::DegreePattern));
            }
        }
    }
    let low = low_degree_factors(f, (d / 2).max(1))?;
    let reducible = d >= 2 && !low.factors.is_empty();
    Ok((!reducible, IrreducibilityCertificate::FullFactorization))
}

/// Smallest degree of an irreducible factor of degree `< deg f`, if any.
pub fn smallest_factor_degree(f: &IntPolynomial) -> Result<Option<usize>> {
    let d = check_family_input(f)?;
    if d == 1 {
        return Ok(None);
    }
    let low = low_degree_factors(f, (d / 2).max(1))?;
    Ok(low.factors.iter().map(|(g, _)| g.degree().unwrap()).min())
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Exhaustive oracle: every monic irreducible divisor of `f` of degree at most
/// `m_max`, found by trial division over all monic `g` with
/// `|b_j| <= (K+1)^(m-j) C(m, j)`, where every root of `f` has modulus below `K + 1`.
pub fn exhaustive_low_degree_factors(f: &IntPolynomial, m_max: usize) -> Result<FactorizationResult> {
    check_family_input(f)?;
    let k1 = f.coeffs()[..f.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default()
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("coefficients too large".into()))?
        + 1;
    let a0 = f.constant_term();
    let mut divisors: Vec<IntPolynomial> = Vec::new();
    for m in 1..=m_max as u64 {
        let bounds: Vec<i64> = (0..m)
            .map(|j| (k1.pow((m - j) as u32) * binomial(m, j)) as i64)
            .collect();
        let mut b: Vec<i64> = bounds.iter().map(|&x| -x).collect();
        loop {
            if b[0] != 0 && (&a0 % BigInt::from(b[0])).is_zero() {
                let mut c = b.clone();
                c.push(1);
                let g = IntPolynomial::from_i64(&c);
                if f.is_divisible_by(&g)? {
                    divisors.push(g);
                }
            }
            let mut i = 0;
            loop {
                if i == b.len() {
                    break;
                }
                if b[i] < bounds[i] {
                    b[i] += 1;
                    break;
                }
                b[i] = -bounds[i];
                i += 1;
            }
            if i == b.len() {
                break;
            }
        }
    }
    // irreducible divisors: no divisor of smaller positive degree divides them
    let irreducible: Vec<IntPolynomial> = divisors
        .iter()
        .filter(|g| {
            !divisors
                .iter()
                .any(|h| h.degree() < g.degree() && g.is_divisible_by(h).unwrap())
        })
        .cloned()
        .collect();
    let mut factors: Vec<(IntPolynomial, usize)> = irreducible
        .into_iter()
        .map(|g| {
            let e = multiplicity(f, &g);
            (g, e)
        })
        .collect();
    factors.sort();
    Ok(FactorizationResult {
        input: f.clone(),
        factors,
        method: FactorMethod::Exhaustive,
        certified_complete_to_degree: m_max,
    })
}
