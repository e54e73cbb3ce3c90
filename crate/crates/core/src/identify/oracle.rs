//! Oracle weights `w*(μ) = argmax_{w ∈ Σ_K} F(w)` with
//! `F(w) = inf_{λ ∈ Alt(μ)} Σ_a w_a d(μ_a, λ_a)`, and the characteristic time
//! `T*(μ) = 1 / F(w*)`.
//!
//! Best-arm problems whose arms share a family are solved exactly through
//! the one-dimensional reduction of Garivier and Kaufmann (2016). Everything
//! else goes through entropic mirror ascent on the simplex with random
//! restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::IdentificationProblem;
use crate::error::{Error, Result};
use crate::expfam::{ArmFamily, BanditModel};
use crate::roots::{bisect_increasing, illinois_increasing};

/// Solver settings for the mirror-ascent route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Random starting points besides the uniform one (and the warm start).
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop a run once `F` improved by less than this over a window of
    /// iterations.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            restarts: 10,
            max_iters: 20_000,
            tol: 1e-8,
            seed: 0x0bad_5eed,
        }
    }
}

/// One alternative attaining `F(w*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub alternative: usize,
    /// `Σ_a w*_a d(μ_a, λ_a)` for this alternative.
    pub value: f64,
    pub lambda: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub weights: Vec<f64>,
    /// `T*(μ)`.
    pub characteristic_time: f64,
    /// Alternatives within `1e-6` (relative) of the minimum at `w*`.
    pub witnesses: Vec<Witness>,
}

/// `F(w)`: the value of the inner infimum at weights `w`.
pub fn oracle_value(problem: &IdentificationProblem, model: &BanditModel, weights: &[f64]) -> Result<f64> {
    problem.validate(model.families())?;
    if weights.len() != model.num_arms() {
        return Err(Error::Invalid("weight vector has the wrong length".into()));
    }
    let answer = problem.answer(model.means()).ok_or(Error::TiedAnswer)?;
    Ok(problem
        .alt_infimum(model.families(), weights, model.means(), answer)
        .value)
}

/// Oracle weights and characteristic time with default options.
pub fn oracle_weights(problem: &IdentificationProblem, model: &BanditModel) -> Result<OracleSolution> {
    oracle_weights_with(problem, model.families(), model.means(), &OracleOptions::default(), None)
}

/// Oracle weights for arbitrary (possibly empirical) means, with an optional
/// warm start for the mirror-ascent route.
pub fn oracle_weights_with(
    problem: &IdentificationProblem,
    families: &[ArmFamily],
    means: &[f64],
    opts: &OracleOptions,
    warm: Option<&[f64]>,
) -> Result<OracleSolution> {
    problem.validate(families)?;
    if means.len() != families.len() {
        return Err(Error::Invalid("means and families differ in length".into()));
    }
    let answer = problem.answer(means).ok_or(Error::TiedAnswer)?;
    let weights = match problem {
        IdentificationProblem::BestArm { .. }
            if families.iter().all(|f| f.same_kind(&families[0])) =>
        {
            best_arm_exact(&families[0], means, answer)?
        }
        IdentificationProblem::LargestProfit { pairs: 2 }
            if families.iter().all(|f| matches!(f, ArmFamily::Gaussian { .. })) =>
        {
            // a single alternative with F(w) = g² / (2 Σ σ_a²/w_a), maximized
            // by w_a ∝ σ_a
            let sig: Vec<f64> = families
                .iter()
                .map(|f| match *f {
                    ArmFamily::Gaussian { sigma } => sigma,
                    _ => unreachable!(),
                })
                .collect();
            let s: f64 = sig.iter().sum();
            sig.iter().map(|x| x / s).collect()
        }
        _ => mirror_ascent(problem, families, means, answer, opts, warm)?,
    };
    Ok(finish(problem, families, means, answer, weights))
}

fn finish(
    problem: &IdentificationProblem,
    families: &[ArmFamily],
    means: &[f64],
    answer: usize,
    weights: Vec<f64>,
) -> OracleSolution {
    let mut costs = Vec::new();
    for b in 0..problem.hypotheses() {
        if b != answer {
            let (v, lambda) = problem.alt_cost(families, &weights, means, answer, b);
            costs.push(Witness {
                alternative: b,
                value: v,
                lambda,
            });
        }
    }
    let f = costs.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let witnesses = costs
        .into_iter()
        .filter(|c| c.value <= f * (1.0 + 1e-6))
        .collect();
    OracleSolution {
        weights,
        characteristic_time: 1.0 / f,
        witnesses,
    }
}

/// Exact best-arm weights.
///
/// With `x_b = w_b / w_i` and `m_b(x) = (μ_i + x μ_b)/(1 + x)`, the functions
/// `g_b(x) = d(μ_i, m_b) + x d(μ_b, m_b)` increase from 0 to `d(μ_i, μ_b)`.
/// The optimum has `g_b(x_b) = y` for every `b`, with `y` the root of
/// `Σ_b d(μ_i, m_b(x_b(y))) / d(μ_b, m_b(x_b(y))) = 1`.
fn best_arm_exact(family: &ArmFamily, means: &[f64], best: usize) -> Result<Vec<f64>> {
    let k = means.len();
    let mu1 = means[best];
    if k == 2 {
        // the condition reduces to d(μ_i, m) = d(μ_b, m)
        let b = 1 - best;
        let mu2 = means[b];
        let m = bisect_increasing(
            |m| family.kl_unchecked(mu2, m) - family.kl_unchecked(mu1, m),
            mu2,
            mu1,
            0.0,
        );
        let x = (mu1 - m) / (m - mu2);
        let mut w = vec![0.0; 2];
        w[best] = 1.0 / (1.0 + x);
        w[b] = x / (1.0 + x);
        return Ok(w);
    }
    let others: Vec<usize> = (0..k).filter(|&b| b != best).collect();
    let mix = |b: usize, x: f64| (mu1 + x * means[b]) / (1.0 + x);
    let g = |b: usize, x: f64| {
        let m = mix(b, x);
        family.kl_unchecked(mu1, m) + x * family.kl_unchecked(means[b], m)
    };
    // g_b is concave and increasing with g_b'(x) = d(μ_b, m(x)), so Newton
    // from x = 0 climbs monotonically to the root
    let x_of = |b: usize, y: f64| -> f64 {
        let mut x = 0.0;
        for _ in 0..100 {
            let m = mix(b, x);
            let gap = y - (family.kl_unchecked(mu1, m) + x * family.kl_unchecked(means[b], m));
            let slope = family.kl_unchecked(means[b], m);
            if gap <= 0.0 || !(slope > 0.0) {
                return x;
            }
            let next = x + gap / slope;
            if next - x <= 1e-15 * next {
                return next;
            }
            x = next;
        }
        let mut hi = x.max(1.0);
        let mut n = 0;
        while g(b, hi) < y && n < 1000 {
            hi *= 2.0;
            n += 1;
        }
        bisect_increasing(|x| g(b, x) - y, 0.0, hi, 1e-13 * hi)
    };
    let ratio_sum = |y: f64| -> f64 {
        others
            .iter()
            .map(|&b| {
                let m = mix(b, x_of(b, y));
                family.kl_unchecked(mu1, m) / family.kl_unchecked(means[b], m)
            })
            .sum()
    };
    let y_max = others
        .iter()
        .map(|&b| family.kl_unchecked(mu1, means[b]))
        .fold(f64::INFINITY, f64::min);
    let mut y_hi = if y_max.is_finite() { y_max } else { 1.0 };
    if !y_max.is_finite() {
        let mut n = 0;
        while ratio_sum(y_hi) < 1.0 && n < 1000 {
            y_hi *= 2.0;
            n += 1;
        }
    }
    let y = illinois_increasing(|y| ratio_sum(y) - 1.0, 0.0, y_hi, 1e-14 * y_hi);
    let xs: Vec<f64> = others.iter().map(|&b| x_of(b, y)).collect();
    let total = 1.0 + xs.iter().sum::<f64>();
    if !total.is_finite() {
        return Err(Error::NoConvergence("best-arm weight ratios diverged".into()));
    }
    let mut w = vec![0.0; k];
    w[best] = 1.0 / total;
    for (&b, x) in others.iter().zip(&xs) {
        w[b] = x / total;
    }
    Ok(w)
}

/// Entropic mirror ascent on the concave `F` with supergradient
/// `∂F/∂w_a = d(μ_a, λ_a)` at the binding alternative.
fn mirror_ascent(
    problem: &IdentificationProblem,
    families: &[ArmFamily],
    means: &[f64],
    answer: usize,
    opts: &OracleOptions,
    warm: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let k = families.len();
    let eval = |w: &[f64], grad: &mut [f64]| -> f64 {
        let alt = problem.alt_infimum(families, w, means, answer);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for &(a, l) in &alt.lambda {
            grad[a] = families[a].kl_unchecked(means[a], l);
        }
        alt.value
    };
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0 / k as f64; k]];
    if let Some(w) = warm {
        if w.len() == k && w.iter().all(|x| *x > 0.0 && x.is_finite()) {
            let s: f64 = w.iter().sum();
            starts.push(w.iter().map(|x| x / s).collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let e: Vec<f64> = (0..k)
            .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3)
            .collect();
        let s: f64 = e.iter().sum();
        starts.push(e.iter().map(|x| x / s).collect());
    }

    let mut best_w = starts[0].clone();
    let mut best_f = f64::NEG_INFINITY;
    let mut grad = vec![0.0; k];
    for start in starts {
        let mut w = start;
        let mut run_best_w = w.clone();
        let mut run_best = eval(&w, &mut grad);
        let mut checkpoint = run_best;
        for it in 1..=opts.max_iters {
            let f = eval(&w, &mut grad);
            if f > run_best {
                run_best = f;
                run_best_w.clone_from(&w);
            }
            let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if scale <= 0.0 || !scale.is_finite() {
                break;
            }
            let eta = 1.0 / (scale * (it as f64).sqrt());
            let shift = grad.iter().fold(f64::NEG_INFINITY, |m, &g| m.max(g));
            let mut s = 0.0;
            for (wa, g) in w.iter_mut().zip(&grad) {
                *wa *= (eta * (g - shift)).exp();
                *wa = wa.max(1e-300);
                s += *wa;
            }
            w.iter_mut().for_each(|wa| *wa /= s);
            if it % 500 == 0 {
                if run_best - checkpoint < opts.tol * run_best.abs().max(1e-300) {
                    break;
                }
                checkpoint = run_best;
            }
        }
        if run_best > best_f {
            best_f = run_best;
            best_w = run_best_w;
        }
    }
    if !(best_f > 0.0) || !best_f.is_finite() {
        return Err(Error::NoConvergence(format!(
            "mirror ascent ended with F = {best_f}"
        )));
    }
    Ok(best_w)
}
