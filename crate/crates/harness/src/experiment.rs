//! Monte Carlo estimation of detector probabilities.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use polyirr_core::anticoncentration::{convolve_with_support, sum_distribution, SUM_LAW_LIMIT};
use polyirr_core::bounds::{envelope, Envelope};
use polyirr_core::cyclotomic::{cyclotomic_poly, inverse_phi_table};
use polyirr_core::factorlab::{is_irreducible, low_degree_factors};
use polyirr_core::sampling::{sample_coeffs, CoefficientModel, SAMPLER_VERSION};
use polyirr_core::IntPolynomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Detector, ExperimentConfig};
use crate::stats::{wilson_interval, Z_99};
use crate::{atomic_write, resolve_workers, with_workers, HarnessError, Result};

pub const CSV_NAME: &str = "results.csv";
pub const MANIFEST_NAME: &str = "manifest.json";
pub const CSV_HEADER: &str = "d,K,m,detector,trials,hits,p_hat,wilson_lo,wilson_hi,envelope_sqrtKd,envelope_invK,exact_ref";

/// One `(d, K)` line of the results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub d: u64,
    pub k: u64,
    pub m: u64,
    pub detector: String,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub envelope_sqrt_kd: f64,
    pub envelope_inv_k: f64,
    pub exact_ref: Option<f64>,
}

impl Row {
    pub fn to_csv_line(&self) -> String {
        let exact = self.exact_ref.map_or_else(|| "NaN".to_string(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.k,
            self.m,
            self.detector,
            self.trials,
            self.hits,
            self.p_hat,
            self.wilson_lo,
            self.wilson_hi,
            self.envelope_sqrt_kd,
            self.envelope_inv_k,
            exact
        )
    }

    /// Whether the exact reference lies in `[wilson_lo, wilson_hi]`.
    pub fn exact_in_interval(&self) -> Option<bool> {
        self.exact_ref
            .map(|p| self.wilson_lo <= p && p <= self.wilson_hi)
    }
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// Progress within a partially processed row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub d: u64,
    pub trials_done: u64,
    pub hits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub model: String,
    pub sampler_version: String,
    pub harness_version: String,
    pub started_unix: u64,
    pub updated_unix: u64,
    pub complete: bool,
    pub rows: Vec<Row>,
    pub checkpoint: Option<Checkpoint>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<Row>,
    pub manifest: Manifest,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

impl ExperimentResult {
    pub fn csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Worker threads; defaults to the global pool size. `POLYIRR_THREADS`
    /// caps either value.
    pub workers: Option<usize>,
    /// Continue from a matching incomplete manifest in the output directory.
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: None,
            resume: true,
        }
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// `P(f(1) = 0)` for a monic degree-`d` polynomial under `model`, when an exact
/// law is available.
///
/// For `uniform_symmetric(K)` this convolves `d - 1` uniforms on `[-K, K]` with
/// one uniform on `[-K, K] \ {0}` and reads the mass at `-1`.
pub fn exact_f_at_1(model: &CoefficientModel, d: u64) -> Result<Option<BigRational>> {
    match *model {
        CoefficientModel::ZeroOne | CoefficientModel::UniformPositive { .. } => {
            Ok(Some(BigRational::zero()))
        }
        CoefficientModel::CenteredBinomial { .. } => Ok(None),
        CoefficientModel::UniformSymmetric { k } => {
            if k.saturating_mul(d) > SUM_LAW_LIMIT {
                return Ok(None);
            }
            let (counts, offset) = if d == 1 {
                (vec![BigUint::one()], 0)
            } else {
                let dist = sum_distribution(k, d - 1)?;
                (dist.numerators().to_vec(), dist.offset())
            };
            let ki = k as i64;
            let nonzero: Vec<i64> = (-ki..=ki).filter(|&v| v != 0).collect();
            let (law, offset) = convolve_with_support(&counts, offset, &nonzero);
            let num = usize::try_from(-1 - offset)
                .ok()
                .and_then(|i| law.get(i).cloned())
                .unwrap_or_default();
            let den = BigUint::from(2 * k + 1).pow((d - 1) as u32) * BigUint::from(2 * k);
            Ok(Some(BigRational::new(num.into(), den.into())))
        }
    }
}

/// Everything needed to classify trials at one degree.
struct RowPlan {
    d: u64,
    model: CoefficientModel,
    detector: Detector,
    m: u64,
    cyclotomics: Vec<(usize, Arc<IntPolynomial>)>,
}

impl RowPlan {
    fn new(config: &ExperimentConfig, d: u64) -> Self {
        let k = config.k_for(d);
        let m = config.detector.m_for(d, k);
        let cyclotomics = match config.detector {
            Detector::Cyclotomic { .. } => inverse_phi_table(m)
                .into_values()
                .flatten()
                .map(|n| (n as usize, cyclotomic_poly(n)))
                .collect(),
            _ => Vec::new(),
        };
        Self {
            d,
            model: config.model_for(d),
            detector: config.detector.clone(),
            m,
            cyclotomics,
        }
    }

    fn hit(&self, coeffs: &[i64]) -> Result<bool> {
        match self.detector {
            Detector::FAt1 => Ok(coeffs.iter().map(|&c| c as i128).sum::<i128>() == 0),
            Detector::Cyclotomic { .. } => Ok(self.cyclotomics.iter().any(|(n, q)| {
                let mut folded = vec![0i128; (*n).min(coeffs.len())];
                for (i, &c) in coeffs.iter().enumerate() {
                    folded[i % n] += c as i128;
                }
                let h = IntPolynomial::from_coeffs(folded.into_iter().map(BigInt::from).collect());
                h.is_divisible_by(q).expect("cyclotomic polynomials are monic")
            })),
            Detector::LowDegree { .. } => {
                let f = IntPolynomial::from_i64(coeffs);
                let found = low_degree_factors(&f, self.m as usize)?;
                Ok(found.factors.iter().any(|(g, _)| {
                    g.degree().is_some_and(|e| e as u64 <= self.m && (e as u64) < self.d)
                }))
            }
            Detector::FullIrreducibility => {
                Ok(!is_irreducible(&IntPolynomial::from_i64(coeffs))?.0)
            }
        }
    }

    fn count_hits(&self, seed: u64, trials: std::ops::Range<u64>) -> Result<u64> {
        trials
            .into_par_iter()
            .map(|t| {
                let coeffs = sample_coeffs(&self.model, self.d as usize, seed, t)?;
                Ok(u64::from(self.hit(&coeffs)?))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }
}

fn finish_row(config: &ExperimentConfig, plan: &RowPlan, hits: u64) -> Result<Row> {
    let (d, k) = (plan.d, config.k_for(plan.d));
    let (wilson_lo, wilson_hi) = wilson_interval(hits, config.trials, Z_99);
    let exact_ref = match config.detector {
        Detector::FAt1 => exact_f_at_1(&plan.model, d)?.map(|p| p.to_f64().unwrap()),
        _ => None,
    };
    Ok(Row {
        d,
        k,
        m: plan.m,
        detector: config.detector.label(),
        trials: config.trials,
        hits,
        p_hat: hits as f64 / config.trials as f64,
        wilson_lo,
        wilson_hi,
        envelope_sqrt_kd: envelope(d, k, Envelope::SqrtKd, &config.constants),
        envelope_inv_k: envelope(d, k, Envelope::InvK, &config.constants),
        exact_ref,
    })
}

fn load_resumable(path: &Path, hash: &str) -> Option<Manifest> {
    let text = std::fs::read_to_string(path).ok()?;
    let manifest: Manifest = serde_json::from_str(&text).ok()?;
    (manifest.config_hash == hash && !manifest.complete).then_some(manifest)
}

fn write_manifest(path: &Path, manifest: &mut Manifest) -> Result<()> {
    manifest.updated_unix = unix_now();
    let json = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    atomic_write(path, &json)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with(config, &RunOptions::default())
}

/// Runs every degree of the config, writing `results.csv` and `manifest.json`
/// into the output directory. The CSV depends only on the config.
pub fn run_experiment_with(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentResult> {
    config.validate()?;
    let hash = config.hash();
    let csv_path = config.output_dir.join(CSV_NAME);
    let manifest_path = config.output_dir.join(MANIFEST_NAME);
    let fresh = || Manifest {
        config_hash: hash.clone(),
        config: config.clone(),
        seed: config.seed,
        model: config.model.label(),
        sampler_version: SAMPLER_VERSION.into(),
        harness_version: env!("CARGO_PKG_VERSION").into(),
        started_unix: unix_now(),
        updated_unix: 0,
        complete: false,
        rows: Vec::new(),
        checkpoint: None,
    };
    let mut manifest = if options.resume {
        load_resumable(&manifest_path, &hash).unwrap_or_else(fresh)
    } else {
        fresh()
    };
    let done = manifest.rows.len();
    if manifest.rows.iter().map(|r| r.d).ne(config.d_list.iter().copied().take(done)) {
        manifest = fresh();
    }
    let workers = resolve_workers(options.workers);
    for &d in &config.d_list[manifest.rows.len()..] {
        let plan = RowPlan::new(config, d);
        let (mut start, mut hits) = match &manifest.checkpoint {
            Some(c) if c.d == d => (c.trials_done, c.hits),
            _ => (0, 0),
        };
        while start < config.trials {
            let end = (start + config.checkpoint_every).min(config.trials);
            hits += with_workers(workers, || plan.count_hits(config.seed, start..end))??;
            start = end;
            manifest.checkpoint = Some(Checkpoint {
                d,
                trials_done: start,
                hits,
            });
            if start < config.trials {
                write_manifest(&manifest_path, &mut manifest)?;
            }
        }
        manifest.rows.push(finish_row(config, &plan, hits)?);
        manifest.checkpoint = None;
        atomic_write(&csv_path, rows_to_csv(&manifest.rows).as_bytes())?;
        write_manifest(&manifest_path, &mut manifest)?;
    }
    manifest.complete = true;
    atomic_write(&csv_path, rows_to_csv(&manifest.rows).as_bytes())?;
    write_manifest(&manifest_path, &mut manifest)?;
    if let Some(r) = manifest.rows.iter().find(|r| r.hits > r.trials) {
        return Err(HarnessError::Invariant(format!("hits exceed trials at d = {}", r.d)));
    }
    Ok(ExperimentResult {
        rows: manifest.rows.clone(),
        manifest,
        csv_path,
        manifest_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{KRule, MRule};
    use num_traits::Signed;

    fn config(dir: &Path, detector: Detector, d_list: Vec<u64>, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            model: CoefficientModel::UniformSymmetric { k: 1 },
            d_list,
            k_rule: None,
            trials,
            seed: 3,
            detector,
            constants: Default::default(),
            output_dir: dir.to_path_buf(),
            checkpoint_every: 64,
        }
    }

    /// Exact `P(f(1) = 0)` by enumerating all coefficient vectors.
    fn f_at_1_brute(d: u32, k: i64) -> BigRational {
        let width = (2 * k + 1) as u64;
        let mut zeros = 0u64;
        let mut total = 0u64;
        for idx in 0..width.pow(d) {
            let mut rest = idx;
            let mut sum = 1i64;
            let mut a0_zero = false;
            for i in 0..d {
                let a = (rest % width) as i64 - k;
                rest /= width;
                a0_zero |= i == 0 && a == 0;
                sum += a;
            }
            if !a0_zero {
                total += 1;
                zeros += u64::from(sum == 0);
            }
        }
        BigRational::new(zeros.into(), total.into())
    }

    #[test]
    fn exact_reference_matches_enumeration() {
        for (d, k) in [(1u64, 1i64), (1, 4), (2, 1), (3, 2), (5, 1), (4, 3)] {
            let model = CoefficientModel::UniformSymmetric { k: k as u64 };
            assert_eq!(
                exact_f_at_1(&model, d).unwrap().unwrap(),
                f_at_1_brute(d as u32, k),
                "d={d} K={k}"
            );
        }
        assert_eq!(
            exact_f_at_1(&CoefficientModel::ZeroOne, 10).unwrap(),
            Some(BigRational::zero())
        );
        let cb = CoefficientModel::CenteredBinomial { d: 1, gaussian_approx: false };
        assert_eq!(exact_f_at_1(&cb, 3).unwrap(), None);
    }

    #[test]
    fn exact_reference_is_a_probability() {
        let p = exact_f_at_1(&CoefficientModel::UniformSymmetric { k: 1 }, 100)
            .unwrap()
            .unwrap();
        assert!(p.is_positive() && p < BigRational::one());
        // about 1 / sqrt(2 pi 100 * 2/3)
        assert!((p.to_f64().unwrap() - 0.0489).abs() < 0.002);
    }

    #[test]
    fn single_trial_row() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_experiment(&config(dir.path(), Detector::FAt1, vec![10], 1)).unwrap();
        let row = &r.rows[0];
        assert!(row.p_hat == 0.0 || row.p_hat == 1.0);
        assert!(row.wilson_lo < row.wilson_hi);
        assert!(row.wilson_lo <= row.p_hat && row.p_hat <= row.wilson_hi);
    }

    #[test]
    fn detectors_agree_with_direct_classification() {
        let dir = tempfile::tempdir().unwrap();
        let trials = 400;
        for detector in [
            Detector::FAt1,
            Detector::Cyclotomic { m_rule: MRule::Fixed { m: 2 } },
            Detector::LowDegree { m_rule: MRule::Fixed { m: 1 } },
            Detector::FullIrreducibility,
        ] {
            let cfg = config(dir.path(), detector.clone(), vec![8], trials);
            let got = run_experiment_with(&cfg, &RunOptions { workers: Some(2), resume: false })
                .unwrap()
                .rows[0]
                .hits;
            let model = cfg.model_for(8);
            let mut expect = 0;
            for t in 0..trials {
                let f = polyirr_core::sampling::sample_poly(&model, 8, cfg.seed, t).unwrap();
                let hit = match detector {
                    Detector::FAt1 => f.evaluate_i64(1).is_zero(),
                    Detector::Cyclotomic { .. } => [1u64, 2, 3, 4, 6]
                        .iter()
                        .any(|&n| f.is_divisible_by(&cyclotomic_poly(n)).unwrap()),
                    Detector::LowDegree { .. } => {
                        f.evaluate_i64(1).is_zero()
                            || f.evaluate_i64(-1).is_zero()
                            || !polyirr_core::factorlab::integer_roots(&f).unwrap().is_empty()
                    }
                    Detector::FullIrreducibility => !is_irreducible(&f).unwrap().0,
                };
                expect += u64::from(hit);
            }
            assert_eq!(got, expect, "{}", detector.label());
        }
    }

    #[test]
    fn writes_csv_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path(), Detector::FAt1, vec![5, 9], 200);
        cfg.k_rule = Some(KRule::SqrtD);
        let r = run_experiment(&cfg).unwrap();
        let csv = std::fs::read_to_string(&r.csv_path).unwrap();
        assert_eq!(csv, r.csv());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("9,3,1,f_at_1,200,"));
        let manifest: Manifest =
            serde_json::from_str(&std::fs::read_to_string(&r.manifest_path).unwrap()).unwrap();
        assert!(manifest.complete);
        assert_eq!(manifest.config_hash, cfg.hash());
        assert_eq!(manifest.sampler_version, SAMPLER_VERSION);
        assert_eq!(manifest.rows, r.rows);
    }

    #[test]
    fn resumes_from_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), Detector::FAt1, vec![6, 12], 300);
        let full = run_experiment(&cfg).unwrap();
        // an interrupted run: first row done, second row one checkpoint in
        let plan = RowPlan::new(&cfg, 12);
        let partial_hits = plan.count_hits(cfg.seed, 0..64).unwrap();
        let mut manifest = full.manifest.clone();
        manifest.complete = false;
        manifest.rows.truncate(1);
        manifest.checkpoint = Some(Checkpoint { d: 12, trials_done: 64, hits: partial_hits });
        write_manifest(&full.manifest_path, &mut manifest).unwrap();
        let resumed = run_experiment(&cfg).unwrap();
        assert_eq!(resumed.csv(), full.csv());
        assert_eq!(resumed.manifest.started_unix, full.manifest.started_unix);
    }
}
