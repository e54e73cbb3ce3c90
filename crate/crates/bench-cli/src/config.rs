//! Experiment configuration files.

use std::fmt;
use std::path::PathBuf;

use banditconf::expfam::{ArmFamily, BanditModel};
use banditconf::identify::SamplingRule;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ThresholdCurves,
    BoundedTimeComparison,
    MinUcbPriors,
    BaiSampleComplexity,
    DeviationViolation,
    ProfitIdentification,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::ThresholdCurves,
        ExperimentKind::BoundedTimeComparison,
        ExperimentKind::MinUcbPriors,
        ExperimentKind::BaiSampleComplexity,
        ExperimentKind::DeviationViolation,
        ExperimentKind::ProfitIdentification,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ThresholdCurves => "threshold-curves",
            ExperimentKind::BoundedTimeComparison => "bounded-time-comparison",
            ExperimentKind::MinUcbPriors => "min-ucb-priors",
            ExperimentKind::BaiSampleComplexity => "bai-sample-complexity",
            ExperimentKind::DeviationViolation => "deviation-violation",
            ExperimentKind::ProfitIdentification => "profit-identification",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::ThresholdCurves => {
                "threshold functions T (two/one-sided), C^g (Gaussian, Gamma, ideal) and x + ln x on an x-grid"
            }
            ExperimentKind::BoundedTimeComparison => {
                "bounded-horizon thresholds against the subset and single-arm baselines"
            }
            ExperimentKind::MinUcbPriors => {
                "upper confidence bounds on the smallest mean under four subset priors"
            }
            ExperimentKind::BaiSampleComplexity => {
                "stopping time and error rate of Track-and-Stop for best-arm identification"
            }
            ExperimentKind::DeviationViolation => {
                "frequency at which the self-normalized deviation crosses K T(x/K)"
            }
            ExperimentKind::ProfitIdentification => {
                "stopping time and error rate for largest-profit identification"
            }
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::ThresholdCurves => &[
                "x",
                "T_two",
                "T_one",
                "Cg_gaussian",
                "Cg_gamma",
                "Cg_ideal",
                "x_plus_ln_x",
            ],
            ExperimentKind::BoundedTimeComparison => &[
                "x",
                "set_size",
                "n",
                "ours_bounded",
                "ours_bounded_gaussian",
                "combes",
                "garivier",
            ],
            ExperimentKind::MinUcbPriors => {
                &["M", "t", "U_box", "U_full", "U_uniform", "U_zipf"]
            }
            ExperimentKind::BaiSampleComplexity | ExperimentKind::ProfitIdentification => &[
                "delta",
                "mean_tau",
                "stderr_tau",
                "T_star",
                "lower_bound",
                "error_rate",
                "censored_rate",
            ],
            ExperimentKind::DeviationViolation => &["x", "empirical_violation_rate", "bound"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An x-grid: explicit values, or `count` evenly spaced points from `start`
/// to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { start, stop, count } => match *count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub families: Vec<ArmFamily>,
    pub means: Vec<f64>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<BanditModel, CliError> {
        BanditModel::new(self.families.clone(), self.means.clone())
            .map_err(|e| CliError::config("model", e.to_string()))
    }
}

/// Which stopping threshold an identification experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingKind {
    Universal,
    BaiImproved,
    RankBased,
}

fn default_delta() -> f64 {
    0.1
}

fn default_replications() -> u64 {
    1
}

fn default_max_steps() -> u64 {
    10_000
}

fn default_cache_radius() -> f64 {
    banditconf::identify::DEFAULT_CACHE_RADIUS
}

/// A full experiment description. Fields irrelevant to the chosen experiment
/// are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Confidence levels for the identification experiments; defaults to
    /// `[delta]`.
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: Option<Grid>,
    /// Subset sizes for bounded-time-comparison.
    #[serde(default)]
    pub set_sizes: Vec<usize>,
    /// Horizons `n` for bounded-time-comparison.
    #[serde(default)]
    pub horizons: Vec<f64>,
    /// Numbers `M` of duplicated arms for min-ucb-priors.
    #[serde(default)]
    pub arm_counts: Vec<usize>,
    /// Times `t` at which min-ucb-priors reports.
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    #[serde(default)]
    pub threshold: Option<StoppingKind>,
    #[serde(default)]
    pub sampling: Option<SamplingRule>,
    #[serde(default = "default_cache_radius")]
    pub cache_radius: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form, excluding the output path.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn deltas(&self) -> Vec<f64> {
        if self.deltas.is_empty() {
            vec![self.delta]
        } else {
            self.deltas.clone()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for d in self.deltas().into_iter().chain([self.delta]) {
            if !(d > 0.0 && d < 1.0) {
                return Err(CliError::config("delta", format!("{d} is not in (0, 1)")));
            }
        }
        if self.replications == 0 {
            return Err(CliError::config("replications", "must be at least 1"));
        }
        if !(self.cache_radius >= 0.0) {
            return Err(CliError::config("cache_radius", "must be nonnegative"));
        }
        if let Some(g) = &self.grid {
            let pts = g.points();
            if pts.is_empty() {
                return Err(CliError::config("grid", "grid is empty"));
            }
            if pts.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(CliError::config("grid", "grid points must be finite and nonnegative"));
            }
        }
        match self.experiment {
            ExperimentKind::ThresholdCurves => {
                if self.grid_points().iter().any(|&x| x <= 0.0) {
                    return Err(CliError::config("grid", "threshold curves need x > 0"));
                }
            }
            ExperimentKind::BoundedTimeComparison => {
                if self.set_sizes().contains(&0) {
                    return Err(CliError::config("set_sizes", "set sizes must be at least 1"));
                }
                if self.horizons().iter().any(|&n| !(n >= 3.0 && n.is_finite())) {
                    return Err(CliError::config("horizons", "horizons must be at least 3"));
                }
            }
            ExperimentKind::MinUcbPriors => {
                if self.arm_counts().contains(&0) {
                    return Err(CliError::config("arm_counts", "M must be at least 1"));
                }
                let cps = self.checkpoints();
                if cps.is_empty() || cps.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CliError::config(
                        "checkpoints",
                        "checkpoints must be nonempty and strictly increasing",
                    ));
                }
            }
            ExperimentKind::BaiSampleComplexity | ExperimentKind::ProfitIdentification => {
                let model = self
                    .model
                    .as_ref()
                    .ok_or_else(|| CliError::config("model", "this experiment needs a model"))?
                    .build()?;
                let problem = self.problem(model.num_arms())?;
                problem
                    .validate(model.families())
                    .map_err(|e| CliError::config("model", e.to_string()))?;
                if problem.answer(model.means()).is_none() {
                    return Err(CliError::config("model.means", "the answer is not unique"));
                }
                if self.max_steps < model.num_arms() as u64 {
                    return Err(CliError::config("max_steps", "fewer steps than arms"));
                }
                if self.experiment == ExperimentKind::BaiSampleComplexity
                    && self.threshold == Some(StoppingKind::RankBased)
                {
                    return Err(CliError::config(
                        "threshold",
                        "rank_based is meant for profit-identification; use bai_improved",
                    ));
                }
            }
            ExperimentKind::DeviationViolation => {
                let model = self
                    .model
                    .as_ref()
                    .ok_or_else(|| CliError::config("model", "this experiment needs a model"))?
                    .build()?;
                let _ = model;
                if self.max_steps == 0 {
                    return Err(CliError::config("max_steps", "must be at least 1"));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn problem(
        &self,
        arms: usize,
    ) -> Result<banditconf::identify::IdentificationProblem, CliError> {
        use banditconf::identify::IdentificationProblem as P;
        match self.experiment {
            ExperimentKind::ProfitIdentification => {
                if arms % 2 != 0 {
                    return Err(CliError::config(
                        "model",
                        "largest-profit identification needs an even number of arms (pairs)",
                    ));
                }
                Ok(P::LargestProfit { pairs: arms / 2 })
            }
            _ => Ok(P::BestArm { arms }),
        }
    }

    pub fn grid_points(&self) -> Vec<f64> {
        match (&self.grid, self.experiment) {
            (Some(g), _) => g.points(),
            (None, ExperimentKind::DeviationViolation) => vec![10f64.ln()],
            (None, ExperimentKind::BoundedTimeComparison) => vec![100f64.ln()],
            (None, _) => (1..=50).map(f64::from).collect(),
        }
    }

    pub fn set_sizes(&self) -> Vec<usize> {
        if self.set_sizes.is_empty() {
            vec![1, 2, 5, 10]
        } else {
            self.set_sizes.clone()
        }
    }

    pub fn horizons(&self) -> Vec<f64> {
        if self.horizons.is_empty() {
            vec![1e6]
        } else {
            self.horizons.clone()
        }
    }

    pub fn arm_counts(&self) -> Vec<usize> {
        if self.arm_counts.is_empty() {
            vec![1, 10]
        } else {
            self.arm_counts.clone()
        }
    }

    pub fn checkpoints(&self) -> Vec<u64> {
        if self.checkpoints.is_empty() {
            vec![100, 300, 1_000, 3_000, 10_000]
        } else {
            self.checkpoints.clone()
        }
    }
}
