//! The experiments behind `banditconf run`.
//!
//! Replications run on a rayon pool of `jobs` threads. Each replication owns
//! an rng stream derived from the seed and its index, and results are
//! aggregated in index order, so tables do not depend on `jobs`.

use banditconf::confseq::{min_ucb, PriorKind};
use banditconf::expfam::{ArmFamily, BanditModel, SufficientStats};
use banditconf::identify::{
    oracle_weights, replication_seed, run_episode, uniform_step, EpisodeConfig,
    IdentificationProblem, RunRecord, SamplingRule,
};
use banditconf::thresholds::{
    bounded_combes, bounded_garivier, bounded_time_threshold, c_g, universal_threshold,
    CorrectionClass, GFunction, Sides, StoppingThreshold,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind, StoppingKind};
use crate::error::CliError;
use crate::table::{Cell, ResultTable};

/// Runs `cfg` on `jobs` worker threads.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ResultTable, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::runtime(format!("thread pool: {e}")))?;
    let mut table = pool.install(|| match cfg.experiment {
        ExperimentKind::ThresholdCurves => threshold_curves(cfg),
        ExperimentKind::BoundedTimeComparison => bounded_time(cfg),
        ExperimentKind::MinUcbPriors => min_ucb_priors(cfg),
        ExperimentKind::BaiSampleComplexity | ExperimentKind::ProfitIdentification => {
            identification(cfg)
        }
        ExperimentKind::DeviationViolation => deviation_violation(cfg),
    })?;
    table.metadata = vec![
        ("experiment".into(), cfg.experiment.name().into()),
        ("config_hash".into(), cfg.hash()),
        ("seed".into(), cfg.seed.to_string()),
        ("replications".into(), cfg.replications.to_string()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
    ];
    Ok(table)
}

fn threshold_curves(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let mut t = ResultTable::new(cfg.experiment.columns());
    for x in cfg.grid_points() {
        t.push(vec![
            x.into(),
            universal_threshold(x, Sides::Two)?.into(),
            universal_threshold(x, Sides::One)?.into(),
            c_g(GFunction::Gaussian, x)?.into(),
            c_g(GFunction::Gamma, x)?.into(),
            c_g(GFunction::IdealChiSq, x)?.into(),
            (x + x.ln()).into(),
        ]);
    }
    Ok(t)
}

fn bounded_time(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let mut t = ResultTable::new(cfg.experiment.columns());
    for n in cfg.horizons() {
        for s in cfg.set_sizes() {
            for x in cfg.grid_points() {
                let garivier = if s == 1 {
                    Cell::Num(bounded_garivier(x, n)?)
                } else {
                    Cell::Empty
                };
                t.push(vec![
                    x.into(),
                    s.into(),
                    n.into(),
                    bounded_time_threshold(x, n, s, CorrectionClass::General)?.into(),
                    bounded_time_threshold(x, n, s, CorrectionClass::Gaussian)?.into(),
                    bounded_combes(x, n, s)?.into(),
                    garivier,
                ]);
            }
        }
    }
    Ok(t)
}

/// Means of the min-UCB experiment: `m` arms at 0.1 plus arms at 0.2, 0.3,
/// 0.4 and 0.5.
pub fn min_ucb_means(m: usize) -> Vec<f64> {
    let mut means = vec![0.1; m];
    means.extend([0.2, 0.3, 0.4, 0.5]);
    means
}

/// Upper confidence bounds on the smallest mean at each checkpoint, for the
/// box, full, uniform-sizes and Zipf priors, along one round-robin path.
pub fn min_ucb_path(
    means: &[f64],
    checkpoints: &[u64],
    delta: f64,
    seed: u64,
) -> Result<Vec<[f64; 4]>, CliError> {
    let k = means.len();
    let model = BanditModel::homogeneous(ArmFamily::Bernoulli, means.to_vec())?;
    let families = model.families().to_vec();
    let priors = PriorKind::ALL
        .iter()
        .map(|p| p.prior(k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SufficientStats::new(k);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut t = 0;
    for &cp in checkpoints {
        while t < cp {
            let a = uniform_step(stats.counts());
            stats.observe(a, model.pull(a, &mut rng));
            t += 1;
        }
        let mut row = [0.0; 4];
        for (slot, prior) in row.iter_mut().zip(&priors) {
            *slot = min_ucb(&stats, &families, delta, prior)?.value;
        }
        out.push(row);
    }
    Ok(out)
}

fn min_ucb_priors(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let mut t = ResultTable::new(cfg.experiment.columns());
    let checkpoints = cfg.checkpoints();
    for m in cfg.arm_counts() {
        let means = min_ucb_means(m);
        if checkpoints[0] < means.len() as u64 {
            return Err(CliError::config(
                "checkpoints",
                format!("the first checkpoint must be at least the {} arms", means.len()),
            ));
        }
        let base = replication_seed(cfg.seed, m as u64);
        let paths: Vec<Vec<[f64; 4]>> = (0..cfg.replications)
            .into_par_iter()
            .map(|r| min_ucb_path(&means, &checkpoints, cfg.delta, replication_seed(base, r)))
            .collect::<Result<_, _>>()?;
        let reps = paths.len() as f64;
        for (i, &cp) in checkpoints.iter().enumerate() {
            let mut avg = [0.0; 4];
            for p in &paths {
                for j in 0..4 {
                    avg[j] += p[i][j];
                }
            }
            let mut row = vec![Cell::from(m), Cell::from(cp)];
            row.extend(avg.iter().map(|s| Cell::Num(s / reps)));
            t.push(row);
        }
    }
    Ok(t)
}

/// Stopping threshold named by `kind` for `problem`.
pub fn stopping_for(kind: StoppingKind, problem: &IdentificationProblem) -> StoppingThreshold {
    match kind {
        StoppingKind::Universal => StoppingThreshold::Universal {
            arms: problem.num_arms(),
        },
        StoppingKind::BaiImproved => StoppingThreshold::BaiImproved {
            arms: problem.num_arms(),
        },
        StoppingKind::RankBased => StoppingThreshold::RankBased {
            rank: problem.rank(),
            hypotheses: problem.hypotheses(),
        },
    }
}

/// The episode template of an identification experiment at level `delta`;
/// replications override the seed.
pub fn episode_template(cfg: &ExperimentConfig, delta: f64) -> Result<EpisodeConfig, CliError> {
    let model = cfg
        .model
        .as_ref()
        .ok_or_else(|| CliError::config("model", "this experiment needs a model"))?
        .build()?;
    let problem = cfg.problem(model.num_arms())?;
    let kind = cfg.threshold.unwrap_or(match problem {
        IdentificationProblem::BestArm { .. } => StoppingKind::BaiImproved,
        IdentificationProblem::LargestProfit { .. } => StoppingKind::RankBased,
    });
    let mut ep = EpisodeConfig::new(
        problem,
        model,
        cfg.sampling.unwrap_or(SamplingRule::Tracking),
        stopping_for(kind, &problem),
        delta,
        cfg.seed,
        cfg.max_steps,
    );
    ep.cache_radius = cfg.cache_radius;
    Ok(ep)
}

/// Runs `replications` episodes of `template` with seeds derived from
/// `base_seed`, in replication order.
pub fn replicate(
    template: &EpisodeConfig,
    base_seed: u64,
    replications: u64,
) -> Result<Vec<RunRecord>, CliError> {
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut ep = template.clone();
            ep.seed = replication_seed(base_seed, r);
            run_episode(&ep).map_err(CliError::from)
        })
        .collect()
}

/// Summary of a batch of episodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSummary {
    pub mean_tau: f64,
    pub stderr_tau: f64,
    pub error_rate: f64,
    pub censored_rate: f64,
    pub errors: u64,
    pub floor_violations: u64,
}

pub fn summarize(records: &[RunRecord]) -> EpisodeSummary {
    let n = records.len() as f64;
    let taus: Vec<f64> = records.iter().map(|r| r.tau as f64).collect();
    let mean = taus.iter().sum::<f64>() / n;
    let var = if records.len() > 1 {
        taus.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let errors = records.iter().filter(|r| r.is_error()).count() as u64;
    EpisodeSummary {
        mean_tau: mean,
        stderr_tau: (var / n).sqrt(),
        error_rate: errors as f64 / n,
        censored_rate: records.iter().filter(|r| r.censored).count() as f64 / n,
        errors,
        floor_violations: records.iter().map(|r| r.floor_violations).sum(),
    }
}

fn identification(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let mut t = ResultTable::new(cfg.experiment.columns());
    for (i, delta) in cfg.deltas().into_iter().enumerate() {
        let template = episode_template(cfg, delta)?;
        let t_star = oracle_weights(&template.problem, &template.model)?.characteristic_time;
        let records = replicate(&template, replication_seed(cfg.seed, i as u64), cfg.replications)?;
        let s = summarize(&records);
        t.push(vec![
            delta.into(),
            s.mean_tau.into(),
            s.stderr_tau.into(),
            t_star.into(),
            (t_star * (1.0 / (3.0 * delta)).ln()).into(),
            s.error_rate.into(),
            s.censored_rate.into(),
        ]);
    }
    Ok(t)
}

/// Largest value over `t ≤ max_steps` of
/// `Σ_a [N_a d(μ̂_a, μ_a) - 3 ln(1 + ln N_a)]⁺` along one round-robin path.
pub fn deviation_path_max(model: &BanditModel, max_steps: u64, seed: u64) -> Result<f64, CliError> {
    let k = model.num_arms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_arm = (max_steps as usize) / k + 2;
    let corr: Vec<f64> = (0..=per_arm)
        .map(|n| CorrectionClass::General.correction(n as u64))
        .collect();
    let mut counts = vec![0u64; k];
    let mut sums = vec![0.0; k];
    let mut y = vec![0.0; k];
    let mut best: f64 = 0.0;
    for t in 0..max_steps {
        let a = (t % k as u64) as usize;
        let fam = model.families()[a];
        let mu = model.means()[a];
        counts[a] += 1;
        sums[a] += model.pull(a, &mut rng);
        let n = counts[a];
        let mu_hat = sums[a] / n as f64;
        let d = fam.kl(mu_hat, mu)?;
        y[a] = (n as f64 * d - corr[n as usize]).max(0.0);
        best = best.max(y.iter().sum());
    }
    Ok(best)
}

fn deviation_violation(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let model = cfg
        .model
        .as_ref()
        .ok_or_else(|| CliError::config("model", "this experiment needs a model"))?
        .build()?;
    let k = model.num_arms() as f64;
    let maxima: Vec<f64> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| deviation_path_max(&model, cfg.max_steps, replication_seed(cfg.seed, r)))
        .collect::<Result<_, _>>()?;
    let mut t = ResultTable::new(cfg.experiment.columns());
    for x in cfg.grid_points() {
        let level = k * universal_threshold(x / k, Sides::Two)?;
        let hits = maxima.iter().filter(|&&m| m >= level).count();
        t.push(vec![
            x.into(),
            (hits as f64 / maxima.len() as f64).into(),
            (-x).exp().into(),
        ]);
    }
    Ok(t)
}
