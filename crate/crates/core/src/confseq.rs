//! Anytime-valid confidence regions for the vector of means and the
//! confidence intervals they project to.
//!
//! All regions here are unions over subsets `S` of arms weighted by a
//! cardinality prior `π̃(S) = π(|S|) / C(K, |S|)`. Because the prior only
//! depends on `|S|`, the worst subset of each size is the set of its `k`
//! largest per-arm contributions, so one sort replaces `2^K - 1` checks.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::expfam::{ArmFamily, Side, SufficientStats};
use crate::roots::bisect_increasing;
use crate::thresholds::{CorrectionClass, GFunction, Sides, ThresholdSpec};

/// Distribution `π` over subset sizes `1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetPrior {
    size_weights: Vec<f64>,
}

/// The named cardinality priors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorKind {
    /// All mass on singletons.
    Box,
    /// All mass on the full set.
    Full,
    /// `π(k) = 1/K`.
    UniformSizes,
    /// `π(k) ∝ 1/k`.
    Zipf,
}

impl PriorKind {
    pub const ALL: [PriorKind; 4] = [
        PriorKind::Box,
        PriorKind::Full,
        PriorKind::UniformSizes,
        PriorKind::Zipf,
    ];

    pub fn prior(self, arms: usize) -> Result<SubsetPrior> {
        match self {
            PriorKind::Box => SubsetPrior::box_prior(arms),
            PriorKind::Full => SubsetPrior::full(arms),
            PriorKind::UniformSizes => SubsetPrior::uniform_sizes(arms),
            PriorKind::Zipf => SubsetPrior::zipf(arms),
        }
    }
}

impl SubsetPrior {
    /// `weights[k - 1] = π(k)`; normalized here.
    pub fn from_size_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Invalid("prior needs at least one arm".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || w.is_infinite()) {
            return Err(Error::Invalid("prior weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Invalid("prior weights sum to zero".into()));
        }
        Ok(SubsetPrior {
            size_weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn box_prior(arms: usize) -> Result<Self> {
        Self::point_mass(arms, 1)
    }

    pub fn full(arms: usize) -> Result<Self> {
        Self::point_mass(arms, arms)
    }

    pub fn uniform_sizes(arms: usize) -> Result<Self> {
        Self::from_size_weights(vec![1.0; arms])
    }

    pub fn zipf(arms: usize) -> Result<Self> {
        Self::from_size_weights((1..=arms).map(|k| 1.0 / k as f64).collect())
    }

    fn point_mass(arms: usize, size: usize) -> Result<Self> {
        if arms == 0 {
            return Err(Error::Invalid("prior needs at least one arm".into()));
        }
        let mut w = vec![0.0; arms];
        w[size - 1] = 1.0;
        Ok(SubsetPrior { size_weights: w })
    }

    pub fn num_arms(&self) -> usize {
        self.size_weights.len()
    }

    /// `π(k)`.
    pub fn size_weight(&self, k: usize) -> f64 {
        self.size_weights[k - 1]
    }

    /// `ln π̃(S)` for any `S` with `|S| = k`; `-∞` when `π(k) = 0`.
    pub fn ln_subset_weight(&self, k: usize) -> f64 {
        self.size_weight(k).ln() - ln_binomial(self.num_arms(), k)
    }
}

/// `ln C(n, k)` by summing logs; exact enough for the arm counts in play.
pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
        .sum()
}

/// Everything needed to test membership in a confidence region.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceQuery<'a> {
    pub stats: &'a SufficientStats,
    pub families: &'a [ArmFamily],
    pub delta: f64,
    pub prior: &'a SubsetPrior,
    pub side: Side,
    /// Per-arm correction `c ln(d + ln N_a)` and the matching threshold curve.
    pub class: CorrectionClass,
}

impl<'a> ConfidenceQuery<'a> {
    /// A query using the tightest correction class valid for `families`.
    pub fn new(
        stats: &'a SufficientStats,
        families: &'a [ArmFamily],
        delta: f64,
        prior: &'a SubsetPrior,
        side: Side,
    ) -> Self {
        ConfidenceQuery {
            stats,
            families,
            delta,
            prior,
            side,
            class: CorrectionClass::for_families(families),
        }
    }

    pub fn with_class(mut self, class: CorrectionClass) -> Self {
        self.class = class;
        self
    }

    fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        let k = self.families.len();
        if self.prior.num_arms() != k {
            return Err(Error::Invalid(format!(
                "prior is over {} arms but the model has {k}",
                self.prior.num_arms()
            )));
        }
        self.stats.check_against(self.families)?;
        if self.stats.total() == 0 {
            return Err(Error::Invalid("no arm has been pulled".into()));
        }
        Ok(())
    }

    fn curve(&self) -> ThresholdSpec {
        let sides = match self.side {
            Side::Two => Sides::Two,
            Side::Plus | Side::Minus => Sides::One,
        };
        self.class.curve(sides)
    }

    /// `k 𝒞(ln(1/(δ π̃_k)) / k)` for each `k = 1..=K`; `+∞` for sizes
    /// without prior mass.
    pub fn size_thresholds(&self) -> Vec<f64> {
        size_thresholds(self.prior, self.delta, self.curve())
    }

    /// Per-arm contributions `N_a d(μ̂_a, λ_a) - c ln(d + ln N_a)`, clipped
    /// at zero for the general class. Arms never pulled contribute 0.
    pub fn contributions(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        if lambda.len() != self.families.len() {
            return Err(Error::Invalid(format!(
                "expected {} coordinates, got {}",
                self.families.len(),
                lambda.len()
            )));
        }
        let mut out = Vec::with_capacity(lambda.len());
        for (a, (&l, fam)) in lambda.iter().zip(self.families).enumerate() {
            fam.check_open("lambda", l)?;
            let n = self.stats.count(a);
            if n == 0 {
                out.push(0.0);
                continue;
            }
            let mu = self.stats.mean(a).expect("count is positive");
            let v = n as f64 * fam.kl_sided_unchecked(mu, l, self.side) - self.class.correction(n);
            out.push(if self.class.clipped() { v.max(0.0) } else { v });
        }
        Ok(out)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(domain("delta", delta, "(0, 1)"))
    }
}

fn size_thresholds(prior: &SubsetPrior, delta: f64, curve: ThresholdSpec) -> Vec<f64> {
    (1..=prior.num_arms())
        .map(|k| {
            let lw = prior.ln_subset_weight(k);
            if lw == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            let kf = k as f64;
            let x = (-delta.ln() - lw) / kf;
            kf * curve.evaluate_unchecked(x)
        })
        .collect()
}

/// `max_k (sum of the k largest contributions - thresholds[k-1])`.
///
/// Sorts `contribs` in place.
fn worst_excess(contribs: &mut [f64], thresholds: &[f64]) -> f64 {
    contribs.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (c, thr) in contribs.iter().zip(thresholds) {
        acc += c;
        worst = worst.max(acc - thr);
    }
    worst
}

/// Whether `lambda` lies in the confidence region: for every subset `S`,
/// `Σ_{a∈S} contribution_a ≤ |S| 𝒞(ln(1/(δ π̃(S))) / |S|)`.
pub fn region_contains(query: &ConfidenceQuery<'_>, lambda: &[f64]) -> Result<bool> {
    let mut contribs = query.contributions(lambda)?;
    let thresholds = query.size_thresholds();
    Ok(worst_excess(&mut contribs, &thresholds) <= 0.0)
}

fn gaussian_sigmas(families: &[ArmFamily]) -> Result<Vec<f64>> {
    families
        .iter()
        .map(|f| match *f {
            ArmFamily::Gaussian { sigma } => Ok(sigma),
            other => Err(Error::Unsupported(format!(
                "linear confidence intervals need Gaussian arms, got {other}"
            ))),
        })
        .collect()
}

fn linear_setup(
    coeffs: &[f64],
    stats: &SufficientStats,
    families: &[ArmFamily],
    delta: f64,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    check_delta(delta)?;
    if coeffs.len() != families.len() {
        return Err(Error::Invalid(format!(
            "expected {} coefficients, got {}",
            families.len(),
            coeffs.len()
        )));
    }
    let sigmas = gaussian_sigmas(families)?;
    stats.check_against(families)?;
    let means = stats.means()?;
    let center = coeffs.iter().zip(&means).map(|(c, m)| c * m).sum();
    Ok((sigmas, means, center))
}

/// Interval for `cᵀμ` from the box region (singleton prior) over Gaussian
/// arms: `cᵀμ̂ ± Σ_a |c_a| σ_a √(2 (C^{g_G}(ln(K/δ)) + 2 ln(4 + ln N_a)) / N_a)`.
pub fn box_ci_linear(
    coeffs: &[f64],
    stats: &SufficientStats,
    families: &[ArmFamily],
    delta: f64,
) -> Result<(f64, f64)> {
    let (sigmas, _, center) = linear_setup(coeffs, stats, families, delta)?;
    let k = families.len() as f64;
    let base = GFunction::Gaussian.threshold_unchecked((k / delta).ln());
    let class = CorrectionClass::Gaussian;
    let radius: f64 = coeffs
        .iter()
        .zip(&sigmas)
        .zip(stats.counts())
        .map(|((c, s), &n)| {
            let n_f = n as f64;
            c.abs() * s * (2.0 * (base + class.correction(n)) / n_f).sqrt()
        })
        .sum();
    Ok((center - radius, center + radius))
}

/// Interval for `cᵀμ` from the full-set region over Gaussian arms:
/// `cᵀμ̂ ± √(2 (K C^{g_G}(ln(1/δ)/K) + Σ_a 2 ln(4 + ln N_a)) Σ_a c_a² σ_a² / N_a)`.
pub fn ellipse_ci_linear(
    coeffs: &[f64],
    stats: &SufficientStats,
    families: &[ArmFamily],
    delta: f64,
) -> Result<(f64, f64)> {
    let (sigmas, _, center) = linear_setup(coeffs, stats, families, delta)?;
    let k = families.len() as f64;
    let class = CorrectionClass::Gaussian;
    let budget = k * GFunction::Gaussian.threshold_unchecked((1.0 / delta).ln() / k)
        + stats.counts().iter().map(|&n| class.correction(n)).sum::<f64>();
    let spread: f64 = coeffs
        .iter()
        .zip(&sigmas)
        .zip(stats.counts())
        .map(|((c, s), &n)| c * c * s * s / n as f64)
        .sum();
    let radius = (2.0 * budget * spread).sqrt();
    Ok((center - radius, center + radius))
}

/// Distance from the open boundary at which bound endpoints are clipped.
pub const BOUNDARY_CLIP: f64 = 1e-12;

fn require_all_pulled(stats: &SufficientStats) -> Result<()> {
    match stats.counts().iter().position(|&n| n == 0) {
        Some(arm) => Err(Error::EmptyArm { arm }),
        None => Ok(()),
    }
}

/// Lower confidence bound on `min_a μ_a`.
///
/// For each arm, `θ_a ≤ μ̂_a` solves
/// `N_a d⁻(μ̂_a, θ_a) = 3 ln(1 + ln N_a) + 𝒯(ln(K/δ))` with the one-sided
/// `𝒯`; the bound is `min_a θ_a`. Where the equation has no solution above
/// the bottom of the domain, `θ_a` is clipped just inside it.
pub fn min_lcb(stats: &SufficientStats, families: &[ArmFamily], delta: f64) -> Result<f64> {
    check_delta(delta)?;
    stats.check_against(families)?;
    require_all_pulled(stats)?;
    let k = families.len() as f64;
    let base = ThresholdSpec::universal(Sides::One).evaluate_unchecked((k / delta).ln());
    let class = CorrectionClass::General;
    let mut best = f64::INFINITY;
    for (a, fam) in families.iter().enumerate() {
        let n = stats.count(a);
        let mu = stats.mean(a).expect("all arms pulled");
        let level = (class.correction(n) + base) / n as f64;
        best = best.min(lower_bound_one(fam, mu, level));
    }
    Ok(best)
}

/// `θ ≤ μ` with `d(μ, θ) = level`.
fn lower_bound_one(fam: &ArmFamily, mu: f64, level: f64) -> f64 {
    if let ArmFamily::Gaussian { sigma } = *fam {
        return mu - sigma * (2.0 * level).sqrt();
    }
    let (lo, _) = fam.mean_domain();
    let floor = lo + BOUNDARY_CLIP;
    if mu <= floor || fam.kl_unchecked(mu, floor) <= level {
        return floor;
    }
    // d(μ, ·) decreases on (floor, μ]
    bisect_increasing(|th| level - fam.kl_unchecked(mu, th), floor, mu, 0.0)
}

/// Result of [`min_ucb`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinUcb {
    pub value: f64,
    /// The data never rule out any value up to the top of the domain; `value`
    /// is then the clipped supremum.
    pub vacuous: bool,
}

/// Upper confidence bound on `min_a μ_a` from the one-sided region with the
/// given prior: the largest `θ` such that, for every subset `S`,
/// `Σ_{a∈S} [N_a d⁺(μ̂_a, θ) - 3 ln(1 + ln N_a)]⁺ ≤ |S| 𝒯(ln(1/(δ π̃(S))) / |S|)`.
pub fn min_ucb(
    stats: &SufficientStats,
    families: &[ArmFamily],
    delta: f64,
    prior: &SubsetPrior,
) -> Result<MinUcb> {
    check_delta(delta)?;
    stats.check_against(families)?;
    require_all_pulled(stats)?;
    if prior.num_arms() != families.len() {
        return Err(Error::Invalid(format!(
            "prior is over {} arms but the model has {}",
            prior.num_arms(),
            families.len()
        )));
    }
    let means = stats.means()?;
    let counts = stats.counts();
    let class = CorrectionClass::General;
    let corrections: Vec<f64> = counts.iter().map(|&n| class.correction(n)).collect();
    let thresholds = size_thresholds(prior, delta, ThresholdSpec::universal(Sides::One));
    let mut buf = vec![0.0; families.len()];
    let mut excess = |theta: f64| {
        for (a, fam) in families.iter().enumerate() {
            let v = counts[a] as f64 * fam.kl_sided_unchecked(means[a], theta, Side::Plus)
                - corrections[a];
            buf[a] = v.max(0.0);
        }
        worst_excess(&mut buf, &thresholds)
    };

    // at θ = min μ̂ every d⁺ vanishes, so the excess is negative there
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let dom_hi = families
        .iter()
        .map(|f| f.mean_domain().1)
        .fold(f64::INFINITY, f64::min);
    let hi = if dom_hi.is_finite() {
        let top = dom_hi - BOUNDARY_CLIP;
        if excess(top) <= 0.0 {
            return Ok(MinUcb {
                value: top,
                vacuous: true,
            });
        }
        top
    } else {
        let n_min = counts.iter().copied().min().expect("at least one arm") as f64;
        let scale = families
            .iter()
            .zip(&means)
            .map(|(f, &m)| f.variance(m.max(BOUNDARY_CLIP)).sqrt())
            .fold(0.0, f64::max)
            .max(1.0);
        let mut step = 50.0 * scale / n_min.sqrt();
        let mut hi = lo + step;
        let mut tries = 0;
        while excess(hi) <= 0.0 {
            step *= 2.0;
            hi = lo + step;
            tries += 1;
            if tries > 200 || !hi.is_finite() {
                return Ok(MinUcb {
                    value: f64::MAX,
                    vacuous: true,
                });
            }
        }
        hi
    };
    let value = bisect_increasing(&mut excess, lo, hi, 1e-11);
    Ok(MinUcb {
        value,
        vacuous: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholds::universal_threshold;
    use approx::assert_abs_diff_eq;

    fn gaussian(k: usize) -> Vec<ArmFamily> {
        vec![ArmFamily::Gaussian { sigma: 1.0 }; k]
    }

    #[test]
    fn priors_are_normalized() {
        for k in 1..12 {
            for kind in PriorKind::ALL {
                let p = kind.prior(k).unwrap();
                let s: f64 = (1..=k).map(|j| p.size_weight(j)).sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
                // induced subset weights also sum to one
                let total: f64 = (1..=k)
                    .map(|j| p.ln_subset_weight(j).exp() * ln_binomial(k, j).exp())
                    .sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn log_binomial_small_cases() {
        assert_abs_diff_eq!(ln_binomial(10, 3), 120.0f64.ln(), epsilon = 1e-12);
        assert_eq!(ln_binomial(7, 0), 0.0);
        assert_eq!(ln_binomial(7, 7), 0.0);
    }

    #[test]
    fn empirical_means_are_always_inside() {
        let fams = vec![ArmFamily::Bernoulli; 3];
        let stats = SufficientStats::from_means(vec![10, 20, 30], &[0.3, 0.5, 0.9]).unwrap();
        let prior = SubsetPrior::uniform_sizes(3).unwrap();
        let q = ConfidenceQuery::new(&stats, &fams, 0.01, &prior, Side::Two);
        assert!(region_contains(&q, &[0.3, 0.5, 0.9]).unwrap());
        assert!(!region_contains(&q, &[0.3, 0.5, 0.01]).unwrap());
    }

    #[test]
    fn single_arm_box_specialisation() {
        let fams = gaussian(1);
        let n = 40u64;
        let stats = SufficientStats::from_means(vec![n], &[0.0]).unwrap();
        let prior = SubsetPrior::box_prior(1).unwrap();
        let delta: f64 = 0.05;
        let q = ConfidenceQuery::new(&stats, &fams, delta, &prior, Side::Two)
            .with_class(CorrectionClass::General);
        let budget = 3.0 * (1.0 + (n as f64).ln()).ln()
            + universal_threshold((1.0 / delta).ln(), Sides::Two).unwrap();
        let edge = (2.0 * budget / n as f64).sqrt();
        assert!(region_contains(&q, &[edge * 0.999]).unwrap());
        assert!(!region_contains(&q, &[edge * 1.001]).unwrap());
    }

    #[test]
    fn lcb_single_gaussian_closed_form() {
        let fams = gaussian(1);
        let n = 25u64;
        let stats = SufficientStats::from_means(vec![n], &[2.0]).unwrap();
        let delta: f64 = 0.1;
        let rhs = 3.0 * (1.0 + (n as f64).ln()).ln()
            + universal_threshold((1.0 / delta).ln(), Sides::One).unwrap();
        let expected = 2.0 - (2.0 * rhs / n as f64).sqrt();
        assert_abs_diff_eq!(min_lcb(&stats, &fams, delta).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn ucb_single_arm_box_matches_kl_ucb_equation() {
        let fams = vec![ArmFamily::Bernoulli];
        let n = 200u64;
        let mu = 0.3;
        let stats = SufficientStats::from_means(vec![n], &[mu]).unwrap();
        let delta: f64 = 0.05;
        let prior = SubsetPrior::box_prior(1).unwrap();
        let u = min_ucb(&stats, &fams, delta, &prior).unwrap();
        assert!(!u.vacuous);
        let rhs = 3.0 * (1.0 + (n as f64).ln()).ln()
            + universal_threshold((1.0 / delta).ln(), Sides::One).unwrap();
        let lhs = n as f64 * fams[0].kl(mu, u.value).unwrap();
        assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn bernoulli_ucb_can_be_vacuous() {
        let fams = vec![ArmFamily::Bernoulli];
        let stats = SufficientStats::from_means(vec![1], &[1.0]).unwrap();
        let prior = SubsetPrior::box_prior(1).unwrap();
        let u = min_ucb(&stats, &fams, 0.01, &prior).unwrap();
        assert!(u.vacuous);
        assert!(u.value < 1.0);
    }

    #[test]
    fn linear_intervals_need_gaussian_arms_and_pulls() {
        let stats = SufficientStats::from_means(vec![5, 5], &[0.2, 0.4]).unwrap();
        let fams = vec![ArmFamily::Bernoulli; 2];
        assert!(box_ci_linear(&[1.0, 1.0], &stats, &fams, 0.1).is_err());
        let g = gaussian(2);
        let empty = SufficientStats::from_means(vec![5, 0], &[0.2, 0.0]).unwrap();
        assert!(ellipse_ci_linear(&[1.0, 1.0], &empty, &g, 0.1).is_err());
        let (lo, hi) = box_ci_linear(&[0.0, 0.0], &stats, &g, 0.1).unwrap();
        assert_eq!((lo, hi), (0.0, 0.0));
    }

    #[test]
    fn lcb_requires_every_arm() {
        let stats = SufficientStats::from_means(vec![5, 0], &[0.2, 0.0]).unwrap();
        assert!(matches!(
            min_lcb(&stats, &gaussian(2), 0.1),
            Err(Error::EmptyArm { arm: 1 })
        ));
    }
}
