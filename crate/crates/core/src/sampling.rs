//! Random monic polynomials under the coefficient models of the study.
//!
//! Coefficient `i` of trial `t` is drawn from a ChaCha12 keystream seeded by
//! the master seed, on stream `t`, starting at word `i << 20`. Any trial can be
//! regenerated in isolation and results do not depend on execution order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{Error, IntPolynomial, Result};

pub const SAMPLER_VERSION: &str = "chacha12-stream-v1";
/// Largest model degree for which `4^(2d)` binomial trials are sampled exactly.
pub const CENTERED_BINOMIAL_MAX_D: u32 = 13;
const WORDS_PER_COEFFICIENT: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientModel {
    /// Uniform on `[-K, K]`, constant term conditioned to be nonzero.
    UniformSymmetric { k: u64 },
    /// Fair bits, constant term fixed to 1.
    ZeroOne,
    /// Uniform on `{1, ..., A}`.
    UniformPositive { a: u64 },
    /// `X - n/2` with `X ~ Binomial(n, 1/2)` and `n = 4^(2d)`.
    CenteredBinomial {
        d: u32,
        /// Round a normal sample instead of sampling exactly; allows `d > 13`.
        #[serde(default)]
        gaussian_approx: bool,
    },
}

impl CoefficientModel {
    pub fn label(&self) -> String {
        match self {
            Self::UniformSymmetric { k } => format!("uniform_symmetric({k})"),
            Self::ZeroOne => "zero_one".into(),
            Self::UniformPositive { a } => format!("uniform_positive({a})"),
            Self::CenteredBinomial { d, gaussian_approx: false } => format!("centered_binomial({d})"),
            Self::CenteredBinomial { d, gaussian_approx: true } => {
                format!("centered_binomial({d},gaussian_approx)")
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::UniformSymmetric { k: 0 } => {
                Err(Error::ModelOutOfRange("uniform_symmetric needs K >= 1".into()))
            }
            Self::UniformPositive { a: 0 } => {
                Err(Error::ModelOutOfRange("uniform_positive needs A >= 1".into()))
            }
            Self::CenteredBinomial { d, gaussian_approx } => {
                if d == 0 {
                    Err(Error::ModelOutOfRange("centered_binomial needs d >= 1".into()))
                } else if !gaussian_approx && d > CENTERED_BINOMIAL_MAX_D {
                    Err(Error::ModelOutOfRange(format!(
                        "centered_binomial({d}) exceeds exact sampling range d <= {CENTERED_BINOMIAL_MAX_D}"
                    )))
                } else if d > 31 {
                    Err(Error::ModelOutOfRange(format!("centered_binomial({d}) overflows")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Draws coefficients for one trial.
pub struct TrialStream {
    rng: ChaCha12Rng,
}

impl TrialStream {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(trial_index);
        Self { rng }
    }

    /// Generator positioned at the start of coefficient `index`'s block.
    pub fn coefficient(&mut self, index: usize) -> &mut ChaCha12Rng {
        self.rng
            .set_word_pos((index as u128) << WORDS_PER_COEFFICIENT);
        &mut self.rng
    }
}

fn draw(model: &CoefficientModel, index: usize, rng: &mut ChaCha12Rng) -> i64 {
    match *model {
        CoefficientModel::UniformSymmetric { k } => {
            let k = k as i64;
            loop {
                let v = rng.random_range(-k..=k);
                if index != 0 || v != 0 {
                    return v;
                }
            }
        }
        CoefficientModel::ZeroOne => {
            if index == 0 {
                1
            } else {
                rng.random_range(0..=1)
            }
        }
        CoefficientModel::UniformPositive { a } => rng.random_range(1..=a as i64),
        CoefficientModel::CenteredBinomial { d, gaussian_approx } => {
            let n = 1u64 << (4 * d);
            if gaussian_approx {
                let sd = (n as f64).sqrt() / 2.0;
                Normal::new(0.0, sd).unwrap().sample(rng).round() as i64
            } else {
                let x = Binomial::new(n, 0.5).unwrap().sample(rng);
                x as i64 - (n / 2) as i64
            }
        }
    }
}

/// Coefficients `a_0, ..., a_{d-1}, 1` of trial `trial_index`, low to high.
pub fn sample_coeffs(
    model: &CoefficientModel,
    d: usize,
    master_seed: u64,
    trial_index: u64,
) -> Result<Vec<i64>> {
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    model.validate()?;
    let mut stream = TrialStream::new(master_seed, trial_index);
    let mut out: Vec<i64> = (0..d)
        .map(|i| draw(model, i, stream.coefficient(i)))
        .collect();
    out.push(1);
    Ok(out)
}

/// Monic degree-`d` polynomial for trial `trial_index`.
pub fn sample_poly(
    model: &CoefficientModel,
    d: usize,
    master_seed: u64,
    trial_index: u64,
) -> Result<IntPolynomial> {
    sample_coeffs(model, d, master_seed, trial_index).map(|c| IntPolynomial::from_i64(&c))
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Mean and variance of the coefficient law before any conditioning of the
/// constant term.
pub fn model_mean_variance(model: &CoefficientModel) -> (BigRational, BigRational) {
    match *model {
        CoefficientModel::UniformSymmetric { k } => {
            let k = BigInt::from(k);
            let var = BigRational::new(&k * (&k + 1u32), BigInt::from(3));
            (BigRational::zero(), var)
        }
        CoefficientModel::ZeroOne => (rat(1, 2), rat(1, 4)),
        CoefficientModel::UniformPositive { a } => {
            let a = BigInt::from(a);
            (
                BigRational::new(&a + 1u32, BigInt::from(2)),
                BigRational::new(&a * &a - 1u32, BigInt::from(12)),
            )
        }
        CoefficientModel::CenteredBinomial { d, .. } => {
            let n = BigInt::from(1u8) << (4 * d as usize);
            (BigRational::zero(), BigRational::new(n, BigInt::from(4)))
        }
    }
}
