//! Experiment configuration.

use std::path::PathBuf;

use polyirr_core::bounds::{detector_degree, m0, m1, BoundConstants};
use polyirr_core::sampling::CoefficientModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{HarnessError, Result};

/// Largest degree accepted by the full irreducibility detector.
pub const FULL_IRREDUCIBILITY_MAX_D: u64 = polyirr_core::factorlab::MAX_DEGREE as u64;

/// Coefficient height `K` as a function of the degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KRule {
    Fixed { k: u64 },
    /// `round(sqrt d)`.
    SqrtD,
    /// `round(c d)`.
    Linear { c: f64 },
    /// `round(d^a)`.
    Power { a: f64 },
}

impl KRule {
    /// `K(d)`, rounded to the nearest integer and at least 1.
    pub fn k_for(&self, d: u64) -> u64 {
        let raw = match *self {
            Self::Fixed { k } => return k,
            Self::SqrtD => (d as f64).sqrt(),
            Self::Linear { c } => c * d as f64,
            Self::Power { a } => (d as f64).powf(a),
        };
        (raw.round() as u64).max(1)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Fixed { k } => k >= 1,
            Self::SqrtD => true,
            Self::Linear { c } => c.is_finite() && c > 0.0,
            Self::Power { a } => a.is_finite() && a >= 0.0,
        };
        ok.then_some(())
            .ok_or_else(|| HarnessError::Config(format!("invalid K_rule {self:?}")))
    }
}

/// Degree threshold for the low-degree detectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MRule {
    /// `sqrt(d) / (log d)^2`.
    M0,
    /// `sqrt(d) / (log K d)^2`.
    M1,
    Fixed { m: u64 },
}

impl MRule {
    /// Integer threshold `max(1, floor(m))`, capped at `d`.
    pub fn m_for(&self, d: u64, k: u64) -> u64 {
        let m = match *self {
            Self::M0 if d >= 2 => detector_degree(m0(d)),
            Self::M1 if d >= 2 => detector_degree(m1(d, k)),
            Self::M0 | Self::M1 => 1,
            Self::Fixed { m } => m.max(1),
        };
        m.min(d)
    }

    pub fn label(&self) -> String {
        match self {
            Self::M0 => "m0".into(),
            Self::M1 => "m1".into(),
            Self::Fixed { m } => m.to_string(),
        }
    }
}

/// Event counted as a hit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detector {
    /// Some `Q_n` with `phi(n) <= m` divides `f`.
    Cyclotomic { m_rule: MRule },
    /// `f` has a proper factor of degree at most `m`.
    LowDegree { m_rule: MRule },
    /// `f` is reducible.
    FullIrreducibility,
    /// `f(1) = 0`.
    #[serde(rename = "f_at_1")]
    FAt1,
}

impl Detector {
    pub fn label(&self) -> String {
        match self {
            Self::Cyclotomic { m_rule } => format!("cyclotomic({})", m_rule.label()),
            Self::LowDegree { m_rule } => format!("low_degree({})", m_rule.label()),
            Self::FullIrreducibility => "full_irreducibility".into(),
            Self::FAt1 => "f_at_1".into(),
        }
    }

    /// Degree threshold reported in the `m` column.
    pub fn m_for(&self, d: u64, k: u64) -> u64 {
        match self {
            Self::Cyclotomic { m_rule } | Self::LowDegree { m_rule } => m_rule.m_for(d, k),
            Self::FullIrreducibility => d / 2,
            Self::FAt1 => 1,
        }
    }

    /// Parses the CLI form: `f_at_1`, `full_irreducibility`, `cyclotomic:m0`,
    /// `low_degree:m1`, `low_degree:3`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, rule) = match s.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (s, None),
        };
        let m_rule = |r: Option<&str>| -> Result<MRule> {
            match r.unwrap_or("m0") {
                "m0" => Ok(MRule::M0),
                "m1" => Ok(MRule::M1),
                other => other
                    .parse()
                    .map(|m| MRule::Fixed { m })
                    .map_err(|_| HarnessError::Config(format!("bad m rule {other:?}"))),
            }
        };
        match (kind, rule) {
            ("f_at_1", None) => Ok(Self::FAt1),
            ("full_irreducibility", None) => Ok(Self::FullIrreducibility),
            ("cyclotomic", r) => Ok(Self::Cyclotomic { m_rule: m_rule(r)? }),
            ("low_degree", r) => Ok(Self::LowDegree { m_rule: m_rule(r)? }),
            _ => Err(HarnessError::Config(format!("unknown detector {s:?}"))),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("polyirr-out")
}

fn default_checkpoint_every() -> u64 {
    10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: CoefficientModel,
    pub d_list: Vec<u64>,
    /// Overrides the height of a `uniform_symmetric` model per degree.
    #[serde(default, rename = "K_rule", alias = "k_rule", skip_serializing_if = "Option::is_none")]
    pub k_rule: Option<KRule>,
    pub trials: u64,
    pub seed: u64,
    pub detector: Detector,
    #[serde(default)]
    pub constants: BoundConstants,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Trials between manifest checkpoints.
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(HarnessError::Config(msg.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.d_list.is_empty() || self.d_list.contains(&0) {
            return bad("d_list must be nonempty with every d >= 1");
        }
        if self.checkpoint_every == 0 {
            return bad("checkpoint_every must be at least 1");
        }
        if let Some(rule) = &self.k_rule {
            rule.validate()?;
            if !matches!(self.model, CoefficientModel::UniformSymmetric { .. }) {
                return bad("K_rule applies only to the uniform_symmetric model");
            }
        }
        if let Detector::Cyclotomic { m_rule: MRule::Fixed { m: 0 } }
        | Detector::LowDegree { m_rule: MRule::Fixed { m: 0 } } = self.detector
        {
            return bad("fixed m must be at least 1");
        }
        if self.detector == Detector::FullIrreducibility {
            if let Some(&d) = self.d_list.iter().find(|&&d| d > FULL_IRREDUCIBILITY_MAX_D) {
                return Err(HarnessError::DetectorInfeasible {
                    detector: self.detector.label(),
                    reason: format!("d = {d} exceeds {FULL_IRREDUCIBILITY_MAX_D}"),
                });
            }
        }
        Ok(())
    }

    /// Model used at degree `d`, with `K_rule` applied.
    pub fn model_for(&self, d: u64) -> CoefficientModel {
        match (&self.model, &self.k_rule) {
            (CoefficientModel::UniformSymmetric { .. }, Some(rule)) => {
                CoefficientModel::UniformSymmetric { k: rule.k_for(d) }
            }
            (model, _) => model.clone(),
        }
    }

    /// Coefficient height reported in the `K` column.
    pub fn k_for(&self, d: u64) -> u64 {
        match self.model_for(d) {
            CoefficientModel::UniformSymmetric { k } => k,
            CoefficientModel::ZeroOne => 1,
            CoefficientModel::UniformPositive { a } => a,
            CoefficientModel::CenteredBinomial { d, .. } => 1u64 << (2 * d),
        }
    }

    /// SHA-256 of the canonical JSON form, ignoring `output_dir`.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{"model": {"kind": "uniform_symmetric", "k": 1}, "d_list": [100],
                "trials": 10, "seed": 7, "detector": {"kind": "f_at_1"}}"#,
        )
        .unwrap()
    }

    #[test]
    fn k_rules() {
        assert_eq!(KRule::Fixed { k: 5 }.k_for(1000), 5);
        assert_eq!(KRule::SqrtD.k_for(100), 10);
        assert_eq!(KRule::SqrtD.k_for(2), 1);
        assert_eq!(KRule::Linear { c: 0.5 }.k_for(7), 4);
        assert_eq!(KRule::Linear { c: 0.01 }.k_for(7), 1);
        assert_eq!(KRule::Power { a: 1.5 }.k_for(4), 8);
    }

    #[test]
    fn m_rules() {
        assert_eq!(MRule::M0.m_for(100, 1), 1);
        // sqrt(10^6) / (log 10^6)^2 = 5.23...
        assert_eq!(MRule::M0.m_for(1_000_000, 1), 5);
        assert!(MRule::M1.m_for(1_000_000, 100) <= MRule::M0.m_for(1_000_000, 100));
        assert_eq!(MRule::Fixed { m: 9 }.m_for(4, 1), 4);
        assert_eq!(MRule::M0.m_for(1, 1), 1);
    }

    #[test]
    fn parses_and_validates() {
        let c = base();
        assert_eq!(c.output_dir, PathBuf::from("polyirr-out"));
        assert_eq!(c.model_for(100), CoefficientModel::UniformSymmetric { k: 1 });
        let mut with_rule = c.clone();
        with_rule.k_rule = Some(KRule::SqrtD);
        assert_eq!(with_rule.k_for(400), 20);
        assert!(with_rule.validate().is_ok());

        let mut bad = c.clone();
        bad.trials = 0;
        assert!(matches!(bad.validate(), Err(HarnessError::Config(_))));
        let mut infeasible = c.clone();
        infeasible.detector = Detector::FullIrreducibility;
        assert!(matches!(infeasible.validate(), Err(HarnessError::DetectorInfeasible { .. })));
        let mut wrong_model = with_rule;
        wrong_model.model = CoefficientModel::ZeroOne;
        assert!(wrong_model.validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"model": {"kind": "zero_one"}}"#).is_err());
    }

    #[test]
    fn json_round_trip_and_hash() {
        let c = base();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        let mut moved = c.clone();
        moved.output_dir = PathBuf::from("elsewhere");
        assert_eq!(moved.hash(), c.hash());
        let mut reseeded = c.clone();
        reseeded.seed += 1;
        assert_ne!(reseeded.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn detector_parsing() {
        assert_eq!(Detector::parse("f_at_1").unwrap(), Detector::FAt1);
        assert_eq!(
            Detector::parse("cyclotomic:m0").unwrap(),
            Detector::Cyclotomic { m_rule: MRule::M0 }
        );
        assert_eq!(
            Detector::parse("low_degree:3").unwrap(),
            Detector::LowDegree { m_rule: MRule::Fixed { m: 3 } }
        );
        assert!(Detector::parse("fourier").is_err());
        for d in [Detector::FAt1, Detector::Cyclotomic { m_rule: MRule::M1 }] {
            let json = serde_json::to_string(&d).unwrap();
            assert_eq!(serde_json::from_str::<Detector>(&json).unwrap(), d);
        }
        assert!(serde_json::to_string(&Detector::FAt1).unwrap().contains("\"f_at_1\""));
    }
}
