//! Machine-checkable invariants of every kernel, grouped into suites.

use std::f64::consts::PI;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use polyirr_core::anticoncentration::{
    certify_pbounded_uniform, cosine_product, cosine_product_as_sum, cosine_integral_bound,
    lemma21_integral, point_mass_bound, point_mass_violation, lwo_rhs, max_atom, periodic_trapezoid,
    ExactDistribution, MIN_QUAD_POINTS,
};
use polyirr_core::bounds::{bertrand_prime, divisor_sum, m0, m1};
use polyirr_core::cyclotomic::{
    cyclotomic_poly, euler_phi, fold_mod_zn, inverse_phi, inverse_phi_search_bound, totient_sieve,
};
use polyirr_core::factorlab::{
    census, exhaustive_low_degree_factors, factorize, family_size, is_irreducible,
    low_degree_factors, member, CensusMode,
};
use polyirr_core::mahler::{
    dobrowolski_holds, is_cyclotomic_product, mahler_measure, power_roots_poly, C_DEFAULT,
};
use polyirr_core::{primes, IntPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::census::run_census;
use crate::{atomic_write, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Cyclotomic,
    Anticoncentration,
    Mahler,
    Factorlab,
    Bounds,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Check {
    fn pass(suite: &'static str, name: &str, detail: impl Into<String>) -> Self {
        Self {
            suite,
            name: name.into(),
            passed: true,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn fail(suite: &'static str, name: &str, detail: impl Into<String>, cx: Value) -> Self {
        Self {
            suite,
            name: name.into(),
            passed: false,
            detail: detail.into(),
            counterexample: Some(cx),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// CSV side products as `(file name, contents)`.
    #[serde(skip)]
    pub artifacts: Vec<(String, String)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        for (name, contents) in &self.artifacts {
            atomic_write(&dir.join(name), contents.as_bytes())?;
        }
        Ok(())
    }
}

pub fn run_verify(suite: Suite) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Cyclotomic {
        report.checks.extend(cyclotomic_suite(&|n| (*cyclotomic_poly(n)).clone()));
    }
    if all || suite == Suite::Anticoncentration {
        let (checks, csv) = anticoncentration_suite()?;
        report.checks.extend(checks);
        report.artifacts.push(("point_mass_sweep.csv".into(), csv));
    }
    if all || suite == Suite::Mahler {
        let (checks, csv) = mahler_suite()?;
        report.checks.extend(checks);
        report.artifacts.push(("mahler.csv".into(), csv));
    }
    if all || suite == Suite::Factorlab {
        report.checks.extend(factorlab_suite()?);
    }
    if all || suite == Suite::Bounds {
        report.checks.extend(bounds_suite()?);
    }
    Ok(report)
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize, height: i64) -> IntPolynomial {
    let mut c: Vec<i64> = (0..degree).map(|_| rng.random_range(-height..=height)).collect();
    c.push(1);
    IntPolynomial::from_i64(&c)
}

/// As [`random_poly`] with a nonzero constant term.
fn random_family_poly(rng: &mut ChaCha8Rng, degree: usize, height: i64) -> IntPolynomial {
    let mut c: Vec<i64> = (0..degree).map(|_| rng.random_range(-height..=height)).collect();
    if c[0] == 0 {
        c[0] = if rng.random() { 1 } else { -1 };
    }
    c.push(1);
    IntPolynomial::from_i64(&c)
}

// ---------------------------------------------------------------- cyclotomic

const CYC: &str = "cyclotomic";

/// `Q_n` source, replaceable for fault injection.
pub type CyclotomicProvider<'a> = &'a dyn Fn(u64) -> IntPolynomial;

pub fn cyclotomic_suite(provider: CyclotomicProvider) -> Vec<Check> {
    vec![
        check_cyclotomic_identity(300, provider),
        check_cyclotomic_degrees(300, provider),
        check_fold_equivalence(50, 200, 11),
        check_inverse_phi(64),
    ]
}

/// `prod_{m | n} Q_m = z^n - 1` for every `n <= max_n`.
pub fn check_cyclotomic_identity(max_n: u64, provider: CyclotomicProvider) -> Check {
    let failing: Vec<u64> = (1..=max_n)
        .filter(|&n| {
            let product = primes::divisors(n)
                .into_iter()
                .fold(IntPolynomial::one(), |acc, m| &acc * &provider(m));
            product != IntPolynomial::z_pow_minus_one(n as usize)
        })
        .collect();
    match failing.first() {
        None => Check::pass(CYC, "identity", format!("prod Q_m = z^n - 1 for n <= {max_n}")),
        Some(&n) => Check::fail(
            CYC,
            "identity",
            format!("identity fails at n = {n} ({} values in total)", failing.len()),
            json!({ "n": n, "failing": failing }),
        ),
    }
}

/// `deg Q_n = phi(n)` for every `n <= max_n`.
pub fn check_cyclotomic_degrees(max_n: u64, provider: CyclotomicProvider) -> Check {
    let bad = (1..=max_n).find(|&n| provider(n).degree() != Some(euler_phi(n) as usize));
    match bad {
        None => Check::pass(CYC, "degree", format!("deg Q_n = phi(n) for n <= {max_n}")),
        Some(n) => Check::fail(
            CYC,
            "degree",
            format!("degree of Q_{n} differs from phi({n})"),
            json!({ "n": n, "degree": provider(n).degree(), "phi": euler_phi(n) }),
        ),
    }
}

/// `Q_n | f` iff `Q_n | fold(f, n)`, over random `f` and their `Q_n`
/// multiples, `n <= max_n`.
pub fn check_fold_equivalence(max_n: u64, cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positives = 0;
    for case in 0..cases {
        let n = rng.random_range(1..=max_n);
        let q = cyclotomic_poly(n);
        let deg = rng.random_range(1..=60);
        let base = random_poly(&mut rng, deg, 3);
        let f = if case % 2 == 0 { &base * &*q } else { base };
        let direct = f.is_divisible_by(&q).unwrap();
        let folded = fold_mod_zn(&f, n as usize).is_divisible_by(&q).unwrap();
        positives += usize::from(direct);
        if direct != folded {
            return Check::fail(
                CYC,
                "fold_equivalence",
                format!("fold disagrees for n = {n}"),
                json!({ "n": n, "f": f.to_string() }),
            );
        }
    }
    Check::pass(
        CYC,
        "fold_equivalence",
        format!("{cases} cases ({positives} divisible), n <= {max_n}"),
    )
}

/// `inverse_phi(l)` against a totient sieve up to `2 l^2 + 6`, and `n <= 2 l^2`.
pub fn check_inverse_phi(l_max: u64) -> Check {
    let sieve = totient_sieve(inverse_phi_search_bound(l_max) as usize);
    for l in 1..=l_max {
        let bound = inverse_phi_search_bound(l) as usize;
        let expect: Vec<u64> = (1..=bound as u64).filter(|&n| sieve[n as usize] == l).collect();
        let got = inverse_phi(l);
        if got != expect || got.iter().any(|&n| n > 2 * l * l) {
            return Check::fail(
                CYC,
                "inverse_phi",
                format!("inverse_phi({l}) mismatch"),
                json!({ "l": l, "got": got, "sieve": expect }),
            );
        }
    }
    Check::pass(CYC, "inverse_phi", format!("matches the sieve and n <= 2 l^2 for l <= {l_max}"))
}

// ---------------------------------------------------------- anticoncentration

const AC: &str = "anticoncentration";

pub fn anticoncentration_suite() -> Result<(Vec<Check>, String)> {
    let (point_mass, csv) = point_mass_sweep(16, 64);
    let checks = vec![
        check_sum_laws(8, 40),
        point_mass,
        check_lwo_chain(8, 64)?,
        check_cosine_integral(6, 6)?,
        check_condition3(64, 4096)?,
        check_trig_fact(500, 5),
    ];
    Ok((checks, csv))
}

/// Exact max atom of `S_m` against `(1/(2K+1))^m + 2/K` at every `x`, for all
/// `K <= k_max` and `2 <= m <= m_max`. Also returns the `(K, m, lhs, rhs, pass)` CSV.
pub fn point_mass_sweep(k_max: u64, m_max: u64) -> (Check, String) {
    let mut csv = String::from("K,m,lhs,rhs,pass\n");
    let mut first_bad = None;
    for k in 1..=k_max {
        let mut dist = ExactDistribution::uniform(k);
        for m in 2..=m_max {
            dist = dist.convolve_uniform(k);
            let (_, lhs) = max_atom(&dist);
            let rhs = point_mass_bound(k, m);
            let pass = lhs <= rhs && point_mass_violation(&dist, k).is_none();
            csv.push_str(&format!(
                "{k},{m},{},{},{pass}\n",
                lhs.to_f64().unwrap(),
                rhs.to_f64().unwrap()
            ));
            if !pass && first_bad.is_none() {
                first_bad = Some(json!({ "K": k, "m": m, "lhs": lhs.to_string(), "rhs": rhs.to_string() }));
            }
        }
    }
    let check = match first_bad {
        None => Check::pass(
            AC,
            "point_mass_sweep",
            format!("exact max atom <= bound for K <= {k_max}, 2 <= m <= {m_max}"),
        ),
        Some(cx) => Check::fail(AC, "point_mass_sweep", "point mass above the bound", cx),
    };
    (check, csv)
}

/// Total mass one, symmetry, mode at 0 and nonincreasing max atom in `m`.
pub fn check_sum_laws(k_max: u64, m_max: u64) -> Check {
    for k in 1..=k_max {
        let mut dist = ExactDistribution::uniform(k);
        let mut prev = max_atom(&dist).1;
        for m in 2..=m_max {
            dist = dist.convolve_uniform(k);
            let (x, mass) = max_atom(&dist);
            if !dist.total_mass_is_one() || !dist.is_symmetric() || x != 0 || mass > prev {
                return Check::fail(
                    AC,
                    "sum_laws",
                    format!("sum law sanity fails at K = {k}, m = {m}"),
                    json!({ "K": k, "m": m, "argmax": x }),
                );
            }
            prev = mass;
        }
    }
    Check::pass(AC, "sum_laws", format!("K <= {k_max}, m <= {m_max}"))
}

/// `max_x P(S_m = x) <= lwo_rhs(2K/(2K+1)^2, m, 2) + 1e-9`.
pub fn check_lwo_chain(k_max: u64, m_max: u64) -> Result<Check> {
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let q = BigRational::new(BigInt::from(2 * k), BigInt::from((2 * k + 1) * (2 * k + 1)));
        let mut dist = ExactDistribution::uniform(k);
        for m in 2..=m_max {
            dist = dist.convolve_uniform(k);
            let lhs = max_atom(&dist).1.to_f64().unwrap();
            let rhs = lwo_rhs(&q, m, 2, MIN_QUAD_POINTS)?.value;
            worst = worst.max(lhs - rhs);
            if lhs > rhs + 1e-9 {
                return Ok(Check::fail(
                    AC,
                    "lwo_chain",
                    format!("max atom exceeds the integral bound at K = {k}, m = {m}"),
                    json!({ "K": k, "m": m, "lhs": lhs, "rhs": rhs }),
                ));
            }
        }
    }
    Ok(Check::pass(
        AC,
        "lwo_chain",
        format!("K <= {k_max}, m <= {m_max}; largest lhs - rhs = {worst:e}"),
    ))
}

/// Combinatorial integral against quadrature within `1e-9`, below
/// `(1 - 2^(1-l)) K^(l-1)` exactly, with equality at `(1, 2)` and `(2, 2)`.
pub fn check_cosine_integral(k_max: u64, l_max: u32) -> Result<Check> {
    for k in 1..=k_max {
        for l in 1..=l_max {
            let exact = lemma21_integral(k, l)?;
            let bound = cosine_integral_bound(k, l);
            let quad = periodic_trapezoid(
                |t| {
                    (1..=k)
                        .map(|j| (2.0 * PI * j as f64 * t).cos())
                        .sum::<f64>()
                        .powi(l as i32)
                },
                MIN_QUAD_POINTS,
            )
            .value;
            let gap = (exact.to_f64().unwrap() - quad).abs();
            let equality_expected = l == 2 && k <= 2;
            if gap > 1e-9 || exact > bound || (equality_expected && exact != bound) {
                return Ok(Check::fail(
                    AC,
                    "cosine_integral",
                    format!("integral check fails at K = {k}, l = {l}"),
                    json!({ "K": k, "l": l, "exact": exact.to_string(), "quadrature": quad, "bound": bound.to_string() }),
                ));
            }
        }
    }
    Ok(Check::pass(
        AC,
        "cosine_integral",
        format!("K <= {k_max}, l <= {l_max}; equality at (1,2) and (2,2)"),
    ))
}

/// `|phi_A(t)|^2 <= 1 - mu + mu cos 2 pi t` on the grid, with `phi_A` summed
/// directly over the support.
pub fn check_condition3(k_max: u64, grid: usize) -> Result<Check> {
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let cert = match certify_pbounded_uniform(k, grid) {
            Ok(c) if c.is_consistent() => c,
            other => {
                return Ok(Check::fail(
                    AC,
                    "condition3",
                    format!("certification failed for K = {k}"),
                    json!({ "K": k, "error": format!("{:?}", other.err()) }),
                ))
            }
        };
        let ki = k as i64;
        for j in 0..grid {
            let t = j as f64 / grid as f64;
            let (re, im) = (-ki..=ki).fold((0.0, 0.0), |(re, im), a| {
                let th = 2.0 * PI * a as f64 * t;
                (re + th.cos(), im + th.sin())
            });
            let n = (2 * k + 1) as f64;
            let lhs = (re * re + im * im) / (n * n);
            let rhs = cert.beta_char_fn(t);
            worst = worst.max(lhs - rhs);
            if lhs > rhs + 1e-12 {
                return Ok(Check::fail(
                    AC,
                    "condition3",
                    format!("domination fails at K = {k}, t = {t}"),
                    json!({ "K": k, "t": t, "lhs": lhs, "rhs": rhs }),
                ));
            }
        }
    }
    Ok(Check::pass(
        AC,
        "condition3",
        format!("K <= {k_max} on {grid} points; largest lhs - rhs = {worst:e}"),
    ))
}

/// Product of cosines against its signed-sum expansion within `1e-12`.
pub fn check_trig_fact(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let t: f64 = rng.random();
        let l = rng.random_range(1..=6);
        let js: Vec<i64> = (0..l).map(|_| rng.random_range(-8..=8)).collect();
        let (a, b) = (cosine_product(t, &js), cosine_product_as_sum(t, &js));
        if (a - b).abs() > 1e-12 {
            return Check::fail(AC, "trig_fact", "expansion mismatch", json!({ "t": t, "js": js }));
        }
    }
    Check::pass(AC, "trig_fact", format!("{cases} random tuples"))
}

// -------------------------------------------------------------------- mahler

const MAH: &str = "mahler";
const MAHLER_TOL: f64 = 1e-12;

/// `M(Q_n) = 1 +- 1e-9` for every `n` with `phi(n) <= phi_max`.
pub fn check_cyclotomic_measures(phi_max: u64) -> Result<Check> {
    let ns: Vec<u64> = (1..=2 * phi_max * phi_max + 6)
        .filter(|&n| euler_phi(n) <= phi_max)
        .collect();
    for &n in &ns {
        let rep = mahler_measure(&cyclotomic_poly(n), MAHLER_TOL)?;
        if (rep.measure - 1.0).abs() > 1e-9 {
            return Ok(Check::fail(
                MAH,
                "cyclotomic_measure",
                format!("M(Q_{n}) = {}", rep.measure),
                json!({ "n": n, "measure": rep.measure }),
            ));
        }
    }
    Ok(Check::pass(
        MAH,
        "cyclotomic_measure",
        format!("{} values of n with phi(n) <= {phi_max}", ns.len()),
    ))
}

/// Fifty random monic polynomials of degree at most 8 with coefficients in `[-5, 5]`.
pub fn random_mahler_suite(seed: u64) -> Vec<IntPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..50)
        .map(|_| {
            let deg = rng.random_range(1..=8);
            random_poly(&mut rng, deg, 5)
        })
        .collect()
}

/// Cyclotomic products, Lehmer's polynomial and mixed products, exercising both
/// sides of the Kronecker equivalence.
pub fn structured_mahler_suite() -> Vec<IntPolynomial> {
    let q = |n: u64| (*cyclotomic_poly(n)).clone();
    let lehmer = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
    vec![
        &q(1) * &q(2),
        &(&q(3) * &q(4)) * &q(12),
        &q(7) * &q(7),
        &q(30) * &q(1),
        lehmer.clone(),
        &lehmer * &q(5),
        &q(6) * &IntPolynomial::from_i64(&[-2, 1]),
        IntPolynomial::from_i64(&[-1, -1, 1]),
        IntPolynomial::from_i64(&[0, 0, 1, 1]),
    ]
}

/// `|M(g_p) - M(g)^p| <= 1e-8 M(g)^p` for `p` in `{2, 3, 5}` over `suite`.
pub fn check_power_multiplicativity(suite: &[IntPolynomial]) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for g in suite {
        let base = mahler_measure(g, MAHLER_TOL)?.measure;
        for p in [2u32, 3, 5] {
            let gp = power_roots_poly(g, p)?;
            let mp = mahler_measure(&gp, MAHLER_TOL)?.measure;
            let target = base.powi(p as i32);
            let rel = (mp - target).abs() / target;
            worst = worst.max(rel);
            if rel > 1e-8 {
                return Ok(Check::fail(
                    MAH,
                    "power_multiplicativity",
                    format!("M(g_{p}) differs from M(g)^{p}"),
                    json!({ "g": g.to_string(), "p": p, "m_gp": mp, "m_g_pow": target }),
                ));
            }
        }
    }
    Ok(Check::pass(
        MAH,
        "power_multiplicativity",
        format!("{} polynomials, p in {{2,3,5}}; worst relative gap {worst:e}", suite.len()),
    ))
}

pub fn mahler_suite() -> Result<(Vec<Check>, String)> {
    let random = random_mahler_suite(2024);
    let mut suite = random.clone();
    suite.extend(structured_mahler_suite());

    let mut csv = String::from("polynomial,M,error,cyclotomic_flag\n");
    let mut sandwich_bad = None;
    let mut kronecker_bad = None;
    let mut dobrowolski_misses = Vec::new();
    let mut dobrowolski_checked = 0;
    let mut kronecker_count = 0;
    for g in &suite {
        let rep = mahler_measure(g, MAHLER_TOL)?;
        let flag = is_cyclotomic_product(g);
        csv.push_str(&format!("\"{g}\",{},{},{flag}\n", rep.measure, rep.measure_error));
        if !rep.jensen_sandwich_holds(g) && sandwich_bad.is_none() {
            sandwich_bad = Some(json!({ "g": g.to_string(), "measure": rep.measure }));
        }
        let kronecker_applies = !g.constant_term().is_zero();
        kronecker_count += usize::from(kronecker_applies);
        if kronecker_applies && flag != ((rep.measure - 1.0).abs() <= 1e-8) && kronecker_bad.is_none() {
            kronecker_bad = Some(json!({ "g": g.to_string(), "measure": rep.measure, "flag": flag }));
        }
        let deg = g.degree().unwrap_or(0);
        if (3..=12).contains(&deg) {
            if let Some(holds) = dobrowolski_holds(g, C_DEFAULT, MAHLER_TOL)? {
                dobrowolski_checked += 1;
                if !holds {
                    dobrowolski_misses.push(g.to_string());
                }
            }
        }
    }
    let mut checks = vec![check_cyclotomic_measures(32)?];
    checks.push(match sandwich_bad {
        None => Check::pass(MAH, "jensen_sandwich", format!("{} polynomials", suite.len())),
        Some(cx) => Check::fail(MAH, "jensen_sandwich", "measure outside [1, sum |b_j|]", cx),
    });
    checks.push(match kronecker_bad {
        None => Check::pass(MAH, "kronecker", format!("{} polynomials with g(0) != 0", kronecker_count)),
        Some(cx) => Check::fail(MAH, "kronecker", "cyclotomic flag disagrees with M = 1", cx),
    });
    checks.push(check_power_multiplicativity(&random)?);
    checks.push(Check::pass(
        MAH,
        "dobrowolski_diagnostic",
        format!(
            "{dobrowolski_checked} checked, {} below exp(lambda_m) with c = {C_DEFAULT}: {:?}",
            dobrowolski_misses.len(),
            dobrowolski_misses
        ),
    ));
    Ok((checks, csv))
}

// ----------------------------------------------------------------- factorlab

const FAC: &str = "factorlab";

pub fn factorlab_suite() -> Result<Vec<Check>> {
    Ok(vec![
        check_factorization_soundness(60, 17)?,
        check_low_degree_completeness(5, 2)?,
        check_fixed_constant_count(&[(3, 2), (4, 1), (5, 1)]),
        check_census_consistency(&[(2, 3), (3, 2), (4, 1), (4, 2), (5, 1), (6, 1)])?,
        check_census_bound(100_000)?,
    ])
}

/// Products of random monic factors factor back exactly.
pub fn check_factorization_soundness(cases: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let parts = rng.random_range(1..=3);
        let f = (0..parts).fold(IntPolynomial::one(), |acc, _| {
            let deg = rng.random_range(1..=7);
            &acc * &random_family_poly(&mut rng, deg, 4)
        });
        let res = factorize(&f)?;
        if !res.is_sound() || res.product() != f {
            return Ok(Check::fail(
                FAC,
                "soundness",
                "factorization does not multiply back",
                json!({ "f": f.to_string() }),
            ));
        }
    }
    Ok(Check::pass(FAC, "soundness", format!("{cases} random products")))
}

/// `low_degree_factors` against trial division by every bounded candidate, for
/// every member of `P_{d,K}` with `d <= d_max`, `K <= k_max` and `m <= d/2`.
pub fn check_low_degree_completeness(d_max: usize, k_max: u64) -> Result<Check> {
    let mut count = 0u64;
    for d in 2..=d_max {
        for k in 1..=k_max {
            let n: u64 = family_size(d, k).try_into().unwrap();
            for i in 0..n {
                let f = IntPolynomial::from_i64(&member(d, k, i));
                for m in 1..=d / 2 {
                    let fast = low_degree_factors(&f, m)?;
                    let slow = exhaustive_low_degree_factors(&f, m)?;
                    count += 1;
                    if fast.factors != slow.factors {
                        return Ok(Check::fail(
                            FAC,
                            "completeness",
                            format!("factor lists differ at m = {m}"),
                            json!({ "f": f.to_string(), "m": m }),
                        ));
                    }
                }
            }
        }
    }
    Ok(Check::pass(
        FAC,
        "completeness",
        format!("{count} (f, m) pairs, d <= {d_max}, K <= {k_max}"),
    ))
}

/// Exactly `(2K+1)^(d-1)` members share each constant term.
pub fn check_fixed_constant_count(pairs: &[(usize, u64)]) -> Check {
    for &(d, k) in pairs {
        let n: u64 = family_size(d, k).try_into().unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for i in 0..n {
            *counts.entry(member(d, k, i)[0]).or_insert(0u64) += 1;
        }
        let expect = (2 * k + 1).pow(d as u32 - 1);
        if counts.len() != 2 * k as usize || counts.values().any(|&c| c != expect) {
            return Check::fail(
                FAC,
                "fixed_constant_count",
                format!("constant-term classes are uneven for d = {d}, K = {k}"),
                json!({ "d": d, "K": k }),
            );
        }
    }
    Check::pass(FAC, "fixed_constant_count", format!("{pairs:?}"))
}

/// Census reducible count equals a per-polynomial `is_irreducible` scan.
pub fn check_census_consistency(pairs: &[(usize, u64)]) -> Result<Check> {
    for &(d, k) in pairs {
        let n: u64 = family_size(d, k).try_into().unwrap();
        let mut scan = 0u64;
        for i in 0..n {
            scan += u64::from(!is_irreducible(&IntPolynomial::from_i64(&member(d, k, i)))?.0);
        }
        let counted = census(d, k, CensusMode::Reducibility)?.reducible;
        if counted != BigUint::from(scan) {
            return Ok(Check::fail(
                FAC,
                "census_consistency",
                format!("census and scan disagree for d = {d}, K = {k}"),
                json!({ "d": d, "K": k, "census": counted.to_string(), "scan": scan }),
            ));
        }
    }
    Ok(Check::pass(FAC, "census_consistency", format!("{pairs:?}")))
}

/// Reducible count within the counting bound for every feasible pair up to `limit`.
pub fn check_census_bound(limit: u64) -> Result<Check> {
    let pairs = crate::census::feasible_pairs(limit);
    for &(d, k) in &pairs {
        let rep = run_census(d, k, CensusMode::Reducibility)?;
        if rep.within_bound() != Some(true) {
            return Ok(Check::fail(
                FAC,
                "census_bound",
                format!("reducible count above the bound at d = {d}, K = {k}"),
                json!({
                    "d": d, "K": k,
                    "reducible": rep.result.reducible.to_string(),
                    "bound": rep.bound.map(|b| b.to_string()),
                }),
            ));
        }
    }
    Ok(Check::pass(
        FAC,
        "census_bound",
        format!("{} pairs with |P_dK| <= {limit}", pairs.len()),
    ))
}

// -------------------------------------------------------------------- bounds

const BND: &str = "bounds";

pub fn bounds_suite() -> Result<Vec<Check>> {
    Ok(vec![
        check_m1_le_m0(),
        check_divisor_sum(10_000, 1_000_000)?,
        check_bertrand(1_000_000)?,
    ])
}

/// `m1 <= m0` over `2 <= d <= 5000`, `K` up to `10^9`.
pub fn check_m1_le_m0() -> Check {
    let ks = [1u64, 2, 3, 10, 100, 1000, 1_000_000, 1_000_000_000];
    for d in 2..=5000u64 {
        for &k in &ks {
            if m1(d, k) > m0(d) {
                return Check::fail(BND, "m1_le_m0", "m1 > m0", json!({ "d": d, "K": k }));
            }
        }
    }
    Check::pass(BND, "m1_le_m0", "2 <= d <= 5000, K <= 1e9")
}

/// Exact divisor sums against a sieve for `K <= oracle_max`, and
/// `|sum - K log K| <= 2K` for `10 <= K <= error_max`.
pub fn check_divisor_sum(oracle_max: u64, error_max: u64) -> Result<Check> {
    let n = oracle_max.max(error_max) as usize;
    let mut tau = vec![0u64; n + 1];
    for j in 1..=n {
        for m in (j..=n).step_by(j) {
            tau[m] += 1;
        }
    }
    let mut prefix = 0u64;
    let mut worst: f64 = 0.0;
    for k in 1..=n as u64 {
        prefix += tau[k as usize];
        if k <= oracle_max || k % 997 == 0 || k == error_max {
            let got = divisor_sum(k)?.sum;
            if got != prefix {
                return Ok(Check::fail(
                    BND,
                    "divisor_sum",
                    format!("divisor_sum({k}) = {got}, sieve gives {prefix}"),
                    json!({ "K": k, "got": got, "sieve": prefix }),
                ));
            }
        }
        if (10..=error_max).contains(&k) {
            let err = (prefix as f64 - k as f64 * (k as f64).ln()).abs() / k as f64;
            worst = worst.max(err);
            if err > 2.0 {
                return Ok(Check::fail(
                    BND,
                    "divisor_sum",
                    format!("error term above 2K at K = {k}"),
                    json!({ "K": k, "sum": prefix }),
                ));
            }
        }
    }
    Ok(Check::pass(
        BND,
        "divisor_sum",
        format!("sieve agreement for K <= {oracle_max}; max |sum - K log K| / K = {worst:.4} on [10, {error_max}]"),
    ))
}

/// A prime in `[2K+1, 4K]` for every `K <= k_max`.
pub fn check_bertrand(k_max: u64) -> Result<Check> {
    for k in 1..=k_max {
        let p = bertrand_prime(k)?;
        if !(2 * k + 1..=4 * k).contains(&p) || !primes::is_prime(p) {
            return Ok(Check::fail(BND, "bertrand", format!("bad prime for K = {k}"), json!({ "K": k, "p": p })));
        }
    }
    Ok(Check::pass(BND, "bertrand", format!("K <= {k_max}")))
}
