use serde::{Deserialize, Serialize};

use crate::confseq::BOUNDARY_CLIP;
use crate::error::{Error, Result};
use crate::expfam::{transport_unchecked, ArmFamily};
use crate::roots::{bisect_increasing, golden_section_min, illinois_increasing};

/// A partition of the space of mean vectors into hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum IdentificationProblem {
    /// Which arm has the largest mean.
    BestArm { arms: usize },
    /// Which pair `i` has the largest `μ_{i,1} - μ_{i,2}`. Pair `i` occupies
    /// arms `2i` and `2i + 1`.
    LargestProfit { pairs: usize },
}

/// The cheapest alternative found by [`IdentificationProblem::alt_infimum`].
#[derive(Debug, Clone, PartialEq)]
pub struct AltInfimum {
    /// `inf_{λ ∈ Alt} Σ_a w_a d(μ_a, λ_a)`.
    pub value: f64,
    /// The hypothesis whose region attains it.
    pub alternative: usize,
    /// The minimizing `λ_a` for the arms the constraint involves; every other
    /// arm keeps `λ_a = μ_a`.
    pub lambda: Vec<(usize, f64)>,
}

impl IdentificationProblem {
    pub fn num_arms(&self) -> usize {
        match *self {
            IdentificationProblem::BestArm { arms } => arms,
            IdentificationProblem::LargestProfit { pairs } => 2 * pairs,
        }
    }

    /// Number of hypotheses `M`.
    pub fn hypotheses(&self) -> usize {
        match *self {
            IdentificationProblem::BestArm { arms } => arms,
            IdentificationProblem::LargestProfit { pairs } => pairs,
        }
    }

    /// Number of arms each alternative constraint involves.
    pub fn rank(&self) -> usize {
        match self {
            IdentificationProblem::BestArm { .. } => 2,
            IdentificationProblem::LargestProfit { .. } => 4,
        }
    }

    pub fn validate(&self, families: &[ArmFamily]) -> Result<()> {
        if self.hypotheses() < 2 {
            return Err(Error::Invalid(
                "an identification problem needs at least two hypotheses".into(),
            ));
        }
        if families.len() != self.num_arms() {
            return Err(Error::Invalid(format!(
                "problem has {} arms but {} families were given",
                self.num_arms(),
                families.len()
            )));
        }
        if let IdentificationProblem::LargestProfit { .. } = self {
            if let Some(f) = families.iter().find(|f| matches!(f, ArmFamily::Gamma { .. })) {
                return Err(Error::Unsupported(format!(
                    "largest-profit identification with {f} arms"
                )));
            }
        }
        Ok(())
    }

    /// `i*(μ)`, or `None` when the maximizer is not unique.
    pub fn answer(&self, means: &[f64]) -> Option<usize> {
        match *self {
            IdentificationProblem::BestArm { arms } => unique_argmax((0..arms).map(|a| means[a])),
            IdentificationProblem::LargestProfit { pairs } => {
                unique_argmax((0..pairs).map(|i| means[2 * i] - means[2 * i + 1]))
            }
        }
    }

    /// `inf` over the alternative set of `answer` of `Σ_a w_a d(μ_a, λ_a)`.
    ///
    /// `weights` are pull counts for the GLR statistic or simplex weights for
    /// the oracle problem; zero weights are allowed. Means may sit on the
    /// attainable boundary of their family.
    pub fn alt_infimum(
        &self,
        families: &[ArmFamily],
        weights: &[f64],
        means: &[f64],
        answer: usize,
    ) -> AltInfimum {
        let mut best = AltInfimum {
            value: f64::INFINITY,
            alternative: usize::MAX,
            lambda: Vec::new(),
        };
        for b in 0..self.hypotheses() {
            if b == answer {
                continue;
            }
            let (value, lambda) = self.alt_cost(families, weights, means, answer, b);
            if value < best.value {
                best = AltInfimum {
                    value,
                    alternative: b,
                    lambda,
                };
            }
        }
        best
    }

    /// Cost of the single alternative "hypothesis `b` beats `answer`".
    pub(crate) fn alt_cost(
        &self,
        families: &[ArmFamily],
        weights: &[f64],
        means: &[f64],
        answer: usize,
        b: usize,
    ) -> (f64, Vec<(usize, f64)>) {
        match self {
            IdentificationProblem::BestArm { .. } => {
                let (cost, lb, li) = pair_cost(
                    &families[b],
                    weights[b],
                    means[b],
                    &families[answer],
                    weights[answer],
                    means[answer],
                );
                (cost, vec![(b, lb), (answer, li)])
            }
            IdentificationProblem::LargestProfit { .. } => {
                let idx = [2 * b, 2 * b + 1, 2 * answer, 2 * answer + 1];
                let (cost, lam) = profit_cost(
                    idx.map(|a| &families[a]),
                    idx.map(|a| weights[a]),
                    idx.map(|a| means[a]),
                );
                (cost, idx.iter().copied().zip(lam).collect())
            }
        }
    }
}

fn unique_argmax(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best = None;
    let mut best_v = f64::NEG_INFINITY;
    let mut tied = false;
    for (i, v) in values.enumerate() {
        if v > best_v {
            best = Some(i);
            best_v = v;
            tied = false;
        } else if v == best_v {
            tied = true;
        }
    }
    if tied {
        None
    } else {
        best
    }
}

/// `inf { w₁ d₁(μ₁, λ₁) + w₂ d₂(μ₂, λ₂) : λ₁ ≥ λ₂ }` for arms that may follow
/// different families. Returns the cost and `(λ₁, λ₂)`.
pub(crate) fn pair_cost(
    f1: &ArmFamily,
    w1: f64,
    mu1: f64,
    f2: &ArmFamily,
    w2: f64,
    mu2: f64,
) -> (f64, f64, f64) {
    if f1.same_kind(f2) {
        let t = transport_unchecked(f1, w1, mu1, w2, mu2);
        return (t.cost, t.lambda.0, t.lambda.1);
    }
    if mu1 >= mu2 {
        return (0.0, mu1, mu2);
    }
    // each term is monotone on [μ₁, μ₂], one increasing and one decreasing
    let obj = |l: f64| w1 * f1.kl_unchecked(mu1, l) + w2 * f2.kl_unchecked(mu2, l);
    let (m, v) = golden_section_min(obj, mu1, mu2, 1e-13 * (mu2 - mu1).max(1e-300));
    (v, m, m)
}

/// Signs of the profit constraint `λ_{b,1} - λ_{b,2} - λ_{i,1} + λ_{i,2} ≥ 0`.
const PROFIT_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// `inf Σ_j w_j d(μ_j, λ_j)` over the half-space
/// `λ₀ - λ₁ - λ₂ + λ₃ ≥ 0`.
///
/// At the optimum `w_j (λ_j - μ_j) / V(λ_j) = ν s_j` for a multiplier
/// `ν ≥ 0`; each `λ_j(ν)` is monotone in `ν`, so `ν` is found by bisection on
/// the constraint.
pub(crate) fn profit_cost(
    families: [&ArmFamily; 4],
    weights: [f64; 4],
    means: [f64; 4],
) -> (f64, [f64; 4]) {
    let gap0: f64 = (0..4).map(|j| PROFIT_SIGNS[j] * means[j]).sum();
    if gap0 >= 0.0 {
        return (0.0, means);
    }
    if families
        .iter()
        .all(|f| matches!(f, ArmFamily::Gaussian { .. }))
    {
        return profit_cost_gaussian(families, weights, means, gap0);
    }
    let lambdas = |nu: f64| -> [f64; 4] {
        std::array::from_fn(|j| tilted_mean(families[j], weights[j], means[j], nu * PROFIT_SIGNS[j]))
    };
    let gap = |nu: f64| -> f64 {
        let l = lambdas(nu);
        (0..4).map(|j| PROFIT_SIGNS[j] * l[j]).sum()
    };
    let mut hi = 1.0;
    let mut tries = 0;
    while gap(hi) < 0.0 && tries < 2000 {
        hi *= 2.0;
        tries += 1;
    }
    let nu = illinois_increasing(gap, 0.0, hi, 1e-15 * hi);
    let l = lambdas(nu);
    let cost = (0..4)
        .filter(|&j| weights[j] > 0.0)
        .map(|j| weights[j] * families[j].kl_unchecked(means[j], l[j]))
        .sum();
    (cost, l)
}

fn profit_cost_gaussian(
    families: [&ArmFamily; 4],
    weights: [f64; 4],
    means: [f64; 4],
    gap0: f64,
) -> (f64, [f64; 4]) {
    let var = |j: usize| match *families[j] {
        ArmFamily::Gaussian { sigma } => sigma * sigma,
        _ => unreachable!(),
    };
    // an arm with zero weight moves for free
    if weights.iter().any(|&w| w <= 0.0) {
        let j = weights.iter().position(|&w| w <= 0.0).expect("some weight is zero");
        let mut l = means;
        l[j] -= PROFIT_SIGNS[j] * gap0;
        return (0.0, l);
    }
    let spread: f64 = (0..4).map(|j| var(j) / weights[j]).sum();
    let nu = -gap0 / spread;
    let l = std::array::from_fn(|j| means[j] + nu * PROFIT_SIGNS[j] * var(j) / weights[j]);
    (gap0 * gap0 / (2.0 * spread), l)
}

/// Solves `w (λ - μ) / V(λ) = r` for `λ` inside the open domain, clipping
/// to it when the solution lies on the boundary.
fn tilted_mean(family: &ArmFamily, w: f64, mu: f64, r: f64) -> f64 {
    let (lo, hi) = family.mean_domain();
    let clip = |x: f64| x.clamp(lo + BOUNDARY_CLIP, hi - BOUNDARY_CLIP);
    if r == 0.0 {
        return clip(mu);
    }
    if w <= 0.0 {
        return if r > 0.0 { hi - BOUNDARY_CLIP } else { lo + BOUNDARY_CLIP };
    }
    match *family {
        ArmFamily::Gaussian { sigma } => mu + r * sigma * sigma / w,
        ArmFamily::Poisson => {
            // (λ - μ)/λ = r/w
            let q = r / w;
            if q >= 1.0 {
                f64::MAX
            } else {
                clip(mu.max(BOUNDARY_CLIP) / (1.0 - q))
            }
        }
        ArmFamily::Bernoulli => {
            // w(λ - μ) = rλ(1 - λ); for either sign of r the root in [0, 1]
            // is the one below, written to avoid cancellation
            let b = w - r;
            clip(2.0 * w * mu / (b + (b * b + 4.0 * r * w * mu).sqrt()))
        }
        _ => {
            // sign of (λ - μ)/V(λ) - r/w, which increases in λ
            let f = |l: f64| w * (l - mu) - r * family.variance(l);
            bisect_increasing(f, lo + BOUNDARY_CLIP, (hi - BOUNDARY_CLIP).min(1e300), 0.0)
        }
    }
}
