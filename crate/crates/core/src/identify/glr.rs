use super::problem::IdentificationProblem;
use crate::error::{Error, Result};
use crate::expfam::{ArmFamily, SufficientStats};

/// Value of the GLR statistic and the empirical answer it was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Glr {
    pub value: f64,
    /// `î(t)`; `None` when the empirical answer is tied, in which case the
    /// statistic is 0.
    pub answer: Option<usize>,
}

/// `Λ̂_t = inf_{λ ∈ Alt(μ̂)} Σ_a N_a d(μ̂_a, λ_a)`.
pub fn glr_statistic(
    problem: &IdentificationProblem,
    stats: &SufficientStats,
    families: &[ArmFamily],
) -> Result<Glr> {
    problem.validate(families)?;
    stats.check_against(families)?;
    if let Some(arm) = stats.counts().iter().position(|&n| n == 0) {
        return Err(Error::EmptyArm { arm });
    }
    let means = stats.means()?;
    let weights: Vec<f64> = stats.counts().iter().map(|&n| n as f64).collect();
    Ok(glr_unchecked(problem, families, &weights, &means))
}

pub(crate) fn glr_unchecked(
    problem: &IdentificationProblem,
    families: &[ArmFamily],
    weights: &[f64],
    means: &[f64],
) -> Glr {
    match problem.answer(means) {
        None => Glr {
            value: 0.0,
            answer: None,
        },
        Some(i) => Glr {
            value: problem.alt_infimum(families, weights, means, i).value,
            answer: Some(i),
        },
    }
}
