//! Declarative experiment description. JSON with a strict schema: unknown
//! keys are rejected so configs stay diffable and honest.

use serde::{Deserialize, Serialize};

use lrdhom_core::chaos::{PotentialFn, PotentialSpec};
use lrdhom_core::green::OperatorSpec;
use lrdhom_core::slowly_varying::SlowlyVarying;
use lrdhom_core::Real;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Rate,
    FluctuationDist,
    Autocov,
    HermiteVar,
    Isometry,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Rate => "rate",
            ExperimentKind::FluctuationDist => "fluct",
            ExperimentKind::Autocov => "autocov",
            ExperimentKind::HermiteVar => "hermite",
            ExperimentKind::Isometry => "isometry",
        }
    }

    /// Stream tag separating the experiments in seed space.
    pub fn stream_tag(&self) -> u64 {
        match self {
            ExperimentKind::Rate => 1,
            ExperimentKind::FluctuationDist => 2,
            ExperimentKind::Autocov => 3,
            ExperimentKind::HermiteVar => 4,
            ExperimentKind::Isometry => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum OperatorConfig {
    Laplace {
        q0: f64,
    },
    SpectralFractional {
        exponent: f64,
        q0: f64,
        #[serde(default)]
        modes: Option<usize>,
    },
}

impl OperatorConfig {
    pub fn build(&self, n: usize) -> Result<OperatorSpec<Real>, HarnessError> {
        let spec = match *self {
            OperatorConfig::Laplace { q0 } => OperatorSpec::laplace(q0, n)?,
            OperatorConfig::SpectralFractional {
                exponent,
                q0,
                modes,
            } => OperatorSpec::spectral_fractional(exponent, q0, n, modes)?,
        };
        Ok(spec)
    }

    pub fn is_laplace(&self) -> bool {
        matches!(self, OperatorConfig::Laplace { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "phi", rename_all = "snake_case")]
pub enum PotentialConfig {
    Sin {
        #[serde(default = "one")]
        amplitude: f64,
    },
    CenteredCos {
        #[serde(default = "one")]
        amplitude: f64,
    },
    PureHermite {
        order: usize,
    },
}

fn one() -> f64 {
    1.0
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec<Real>, HarnessError> {
        let phi = match *self {
            PotentialConfig::Sin { amplitude } => PotentialFn::Sin { amplitude },
            PotentialConfig::CenteredCos { amplitude } => PotentialFn::CenteredCos { amplitude },
            PotentialConfig::PureHermite { order } => PotentialFn::PureHermite { order },
        };
        Ok(PotentialSpec::from_catalog(phi)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlowVaryKind {
    Constant,
    Log,
    FgnDriver,
}

impl SlowVaryKind {
    pub fn build(&self, hurst: f64) -> Result<SlowlyVarying<Real>, HarnessError> {
        Ok(match self {
            SlowVaryKind::Constant => SlowlyVarying::constant(1.0)?,
            SlowVaryKind::Log => SlowlyVarying::LogShifted,
            SlowVaryKind::FgnDriver => SlowlyVarying::fgn_driver(hurst)?,
        })
    }
}

/// A named piecewise-constant integrand for the isometry study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFnConfig {
    pub name: String,
    /// (lo, hi, value) pieces on [0, 1].
    pub steps: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub operator: OperatorConfig,
    pub potential: PotentialConfig,
    /// Hermite rank the experiment is pitched at.
    pub hermite_order: usize,
    pub hurst: f64,
    pub slow_vary: SlowVaryKind,
    /// Strictly decreasing scale list for rate/fluctuation kinds.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    pub replicates: usize,
    /// Grid resolution: h = 2^-level, n = 2^level - 1 interior points.
    pub grid_level: u32,
    #[serde(default)]
    pub probes: Vec<f64>,
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: String,
    /// Partial-integral horizon for simulated limit paths.
    #[serde(default = "default_horizon")]
    pub taqqu_horizon: usize,
    /// Output grid of simulated limit paths.
    #[serde(default = "default_path_grid")]
    pub path_grid: usize,
    /// Lags for the autocovariance study.
    #[serde(default)]
    pub lags: Vec<usize>,
    /// Horizon table for the variance study.
    #[serde(default)]
    pub horizons: Vec<usize>,
    /// Integrands for the isometry study; defaults cover the indicator
    /// family and a three-step function.
    #[serde(default)]
    pub integrands: Vec<StepFnConfig>,
}

fn default_out() -> String {
    "results".into()
}

fn default_horizon() -> usize {
    1 << 14
}

fn default_path_grid() -> usize {
    512
}

impl ExperimentConfig {
    pub fn grid_points(&self) -> usize {
        (1usize << self.grid_level) - 1
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let m = self.hermite_order;
        if m == 0 {
            return Err(HarnessError::Config(
                "hermite_order must be at least 1".into(),
            ));
        }
        let lower = 1.0 - 1.0 / (2.0 * m as f64);
        if self.hurst <= lower || self.hurst >= 1.0 {
            return Err(HarnessError::Config(format!(
                "hurst {} outside ({}, 1) admissible for order {}",
                self.hurst, lower, m
            )));
        }
        if self.replicates == 0 {
            return Err(HarnessError::Config("replicates must be positive".into()));
        }
        if self.grid_level < 5 || self.grid_level > 20 {
            return Err(HarnessError::Config("grid_level outside 5..=20".into()));
        }
        let h = 0.5f64.powi(self.grid_level as i32);
        for w in self.epsilons.windows(2) {
            if w[1] >= w[0] {
                return Err(HarnessError::Config(
                    "epsilons must be strictly decreasing".into(),
                ));
            }
        }
        for &eps in &self.epsilons {
            if !(0.0..1.0).contains(&eps) || eps <= 0.0 {
                return Err(HarnessError::Config(format!(
                    "epsilon {} outside (0,1)",
                    eps
                )));
            }
            if h > eps / 8.0 + 1e-15 {
                return Err(HarnessError::Config(format!(
                    "grid too coarse: h = {} exceeds eps/8 for eps = {}",
                    h, eps
                )));
            }
            let lag = eps / h;
            if (lag - lag.round()).abs() > 1e-9 {
                return Err(HarnessError::Config(format!(
                    "epsilon {} is not resolved by the dyadic grid",
                    eps
                )));
            }
        }
        match self.kind {
            ExperimentKind::Rate => {
                if self.epsilons.len() < 4 {
                    return Err(HarnessError::Config(
                        "rate study needs at least 4 scales".into(),
                    ));
                }
            }
            ExperimentKind::FluctuationDist => {
                if self.epsilons.is_empty() {
                    return Err(HarnessError::Config(
                        "fluctuation study needs a scale".into(),
                    ));
                }
                if !self.operator.is_laplace() {
                    return Err(HarnessError::Config(
                        "fluctuation study requires the laplace kind (Lipschitz kernel)".into(),
                    ));
                }
                if self.probes.is_empty() {
                    return Err(HarnessError::Config(
                        "fluctuation study needs a probe".into(),
                    ));
                }
                self.check_limit_path()?;
            }
            ExperimentKind::Autocov => {
                let lags = self.lags_or_default();
                if lags.len() < 4 || lags.last().unwrap() < &(10 * lags[0]) {
                    return Err(HarnessError::Config(
                        "autocov lags must span at least one decade with >= 4 points".into(),
                    ));
                }
            }
            ExperimentKind::HermiteVar | ExperimentKind::Isometry => {
                self.check_limit_path()?;
            }
        }
        Ok(())
    }

    fn check_limit_path(&self) -> Result<(), HarnessError> {
        if self.taqqu_horizon < 1 << 10 {
            return Err(HarnessError::Config(
                "taqqu_horizon below the supported minimum 2^10".into(),
            ));
        }
        if self.path_grid == 0 || !self.taqqu_horizon.is_multiple_of(self.path_grid) {
            return Err(HarnessError::Config(format!(
                "path_grid {} must divide taqqu_horizon {}",
                self.path_grid, self.taqqu_horizon
            )));
        }
        Ok(())
    }

    pub fn lags_or_default(&self) -> Vec<usize> {
        if self.lags.is_empty() {
            vec![8, 16, 32, 64, 128, 256]
        } else {
            self.lags.clone()
        }
    }

    pub fn horizons_or_default(&self) -> Vec<usize> {
        if self.horizons.is_empty() {
            vec![1 << 10, 1 << 12, self.taqqu_horizon]
        } else {
            self.horizons.clone()
        }
    }

    pub fn integrands_or_default(&self) -> Vec<StepFnConfig> {
        if self.integrands.is_empty() {
            vec![
                StepFnConfig {
                    name: "full".into(),
                    steps: vec![(0.0, 1.0, 1.0)],
                },
                StepFnConfig {
                    name: "half".into(),
                    steps: vec![(0.0, 0.5, 1.0)],
                },
                StepFnConfig {
                    name: "three_step".into(),
                    steps: vec![(0.0, 0.25, 1.0), (0.25, 0.5, -0.5), (0.5, 1.0, 2.0)],
                },
            ]
        } else {
            self.integrands.clone()
        }
    }

    /// FNV-1a over the canonical serialization; recorded in result metadata.
    pub fn hash(&self) -> u64 {
        let text = serde_json::to_string(self).expect("config serializes");
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for b in text.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        h
    }
}
