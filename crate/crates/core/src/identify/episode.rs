use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::glr::glr_unchecked;
use super::oracle::{oracle_weights_with, OracleOptions};
use super::problem::IdentificationProblem;
use super::tracking::{tracking_floor, tracking_step, uniform_step};
use crate::error::{domain, Error, Result};
use crate::expfam::{BanditModel, SufficientStats};
use crate::thresholds::StoppingThreshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingRule {
    /// D-Tracking of the plug-in oracle weights.
    Tracking,
    /// Round robin.
    Uniform,
}

/// Default radius (sup norm on `μ̂`) within which cached oracle weights are
/// reused.
pub const DEFAULT_CACHE_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub problem: IdentificationProblem,
    pub model: BanditModel,
    pub sampling: SamplingRule,
    pub threshold: StoppingThreshold,
    pub delta: f64,
    pub seed: u64,
    pub max_steps: u64,
    /// Oracle weights are recomputed only when `μ̂` has moved more than this
    /// since the last solve; 0 recomputes every round.
    pub cache_radius: f64,
    pub record_trace: bool,
    pub oracle: OracleOptions,
}

impl EpisodeConfig {
    pub fn new(
        problem: IdentificationProblem,
        model: BanditModel,
        sampling: SamplingRule,
        threshold: StoppingThreshold,
        delta: f64,
        seed: u64,
        max_steps: u64,
    ) -> Self {
        EpisodeConfig {
            problem,
            model,
            sampling,
            threshold,
            delta,
            seed,
            max_steps,
            cache_radius: DEFAULT_CACHE_RADIUS,
            record_trace: false,
            oracle: OracleOptions {
                restarts: 2,
                ..OracleOptions::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(domain("delta", self.delta, "(0, 1)"));
        }
        self.problem.validate(self.model.families())?;
        self.threshold.validate()?;
        let k = self.model.num_arms();
        if let StoppingThreshold::Universal { arms } = self.threshold {
            if arms != k {
                return Err(Error::Invalid(format!(
                    "universal threshold over {arms} arms for a {k}-arm model"
                )));
            }
        }
        if self.max_steps < k as u64 {
            return Err(Error::Invalid(format!(
                "max_steps = {} is below the {k} initial pulls",
                self.max_steps
            )));
        }
        if !(self.cache_radius >= 0.0) {
            return Err(domain("cache_radius", self.cache_radius, "[0, inf)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: u64,
    pub arm: usize,
    pub observation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub problem: IdentificationProblem,
    pub model: BanditModel,
    pub sampling: SamplingRule,
    pub threshold: StoppingThreshold,
    pub delta: f64,
    /// Stopping time, or `max_steps` when censored.
    pub tau: u64,
    pub censored: bool,
    /// `î(τ)`; `None` iff censored.
    pub recommendation: Option<usize>,
    pub stats: SufficientStats,
    pub trace: Option<Vec<TraceStep>>,
    /// Rounds where the oracle failed and uniform sampling was used instead.
    pub oracle_failures: u64,
    /// Rounds at which some arm fell below `(√t - K/2)₊ - 1` under tracking.
    pub floor_violations: u64,
}

impl RunRecord {
    /// Stopped with a wrong answer.
    pub fn is_error(&self) -> bool {
        match self.recommendation {
            Some(r) => self.problem.answer(self.model.means()) != Some(r),
            None => false,
        }
    }
}

/// Seed of replication `index` derived from `base` through a SplitMix64
/// step, so that neighbouring indices get unrelated streams.
pub fn replication_seed(base: u64, index: u64) -> u64 {
    let mut z = index.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    base ^ (z ^ (z >> 31))
}

struct OracleCache {
    means: Vec<f64>,
    answer: usize,
    weights: Vec<f64>,
}

/// Runs one sequential identification episode: one pull per arm, then the
/// sampling rule until `Λ̂_t > ĉ_t(δ)` or `max_steps`.
pub fn run_episode(config: &EpisodeConfig) -> Result<RunRecord> {
    config.validate()?;
    let problem = &config.problem;
    let model = &config.model;
    let families = model.families();
    let k = model.num_arms();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stats = SufficientStats::new(k);
    let mut trace = config.record_trace.then(Vec::new);
    let mut weights = vec![0.0; k];
    let mut means = vec![0.0; k];
    let stop_const = config.threshold.constant_part(config.delta);

    let mut pull = |arm: usize,
                    stats: &mut SufficientStats,
                    weights: &mut [f64],
                    means: &mut [f64],
                    trace: &mut Option<Vec<TraceStep>>| {
        let x = model.pull(arm, &mut rng);
        stats.observe(arm, x);
        weights[arm] = stats.count(arm) as f64;
        means[arm] = stats.sums()[arm] / weights[arm];
        if let Some(tr) = trace {
            tr.push(TraceStep {
                t: stats.total(),
                arm,
                observation: x,
            });
        }
    };

    for a in 0..k {
        pull(a, &mut stats, &mut weights, &mut means, &mut trace);
    }

    let mut cache: Option<OracleCache> = None;
    let mut oracle_failures = 0;
    let mut floor_violations = 0;
    loop {
        let t = stats.total();
        let glr = glr_unchecked(problem, families, &weights, &means);
        if let Some(answer) = glr.answer {
            let c = stop_const + config.threshold.time_part(stats.counts(), t as f64);
            if glr.value > c {
                return Ok(RunRecord {
                    seed: config.seed,
                    problem: *problem,
                    model: model.clone(),
                    sampling: config.sampling,
                    threshold: config.threshold,
                    delta: config.delta,
                    tau: t,
                    censored: false,
                    recommendation: Some(answer),
                    stats,
                    trace,
                    oracle_failures,
                    floor_violations,
                });
            }
        }
        if t >= config.max_steps {
            return Ok(RunRecord {
                seed: config.seed,
                problem: *problem,
                model: model.clone(),
                sampling: config.sampling,
                threshold: config.threshold,
                delta: config.delta,
                tau: t,
                censored: true,
                recommendation: None,
                stats,
                trace,
                oracle_failures,
                floor_violations,
            });
        }

        let arm = match (config.sampling, glr.answer) {
            (SamplingRule::Uniform, _) | (SamplingRule::Tracking, None) => {
                uniform_step(stats.counts())
            }
            (SamplingRule::Tracking, Some(answer)) => {
                let fresh = cache.as_ref().is_some_and(|c| {
                    c.answer == answer
                        && c.means
                            .iter()
                            .zip(&means)
                            .all(|(a, b)| (a - b).abs() <= config.cache_radius)
                });
                if !fresh {
                    let warm = cache.as_ref().map(|c| c.weights.as_slice());
                    match oracle_weights_with(problem, families, &means, &config.oracle, warm) {
                        Ok(sol) => {
                            cache = Some(OracleCache {
                                means: means.clone(),
                                answer,
                                weights: sol.weights,
                            })
                        }
                        Err(_) => cache = None,
                    }
                }
                match &cache {
                    Some(c) => tracking_step(stats.counts(), &c.weights),
                    None => {
                        oracle_failures += 1;
                        uniform_step(stats.counts())
                    }
                }
            }
        };
        pull(arm, &mut stats, &mut weights, &mut means, &mut trace);

        if config.sampling == SamplingRule::Tracking {
            let floor = tracking_floor(stats.total(), k);
            if stats.counts().iter().any(|&n| (n as f64) < floor) {
                floor_violations += 1;
            }
        }
    }
}
