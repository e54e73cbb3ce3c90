//! One-parameter exponential families in mean parameterization.
//!
//! Every family is identified by the map from its mean `μ` to the divergence
//! `d(μ, λ)` between the members with means `μ` and `λ`. Natural parameters
//! and log-partition functions never appear. All divergences are in nats.
//!
//! | family                 | mean domain | `d(μ, λ)`                           | `V(λ)`   |
//! |------------------------|-------------|-------------------------------------|----------|
//! | Gaussian, std-dev `σ`  | ℝ           | `(μ - λ)² / 2σ²`                    | `σ²`     |
//! | Bernoulli              | (0, 1)      | `μ ln(μ/λ) + (1-μ) ln((1-μ)/(1-λ))` | `λ(1-λ)` |
//! | Gamma, shape `α`       | (0, ∞)      | `α (μ/λ - 1 - ln(μ/λ))`             | `λ²/α`   |
//! | Poisson                | (0, ∞)      | `λ - μ + μ ln(μ/λ)`                 | `λ`      |
//!
//! The derivative of `d(μ, ·)` at `λ` is `(λ - μ) / V(λ)`, which is what makes
//! the two-arm transportation problem ([`transport_cost`]) reduce to a
//! weighted mean.

use std::fmt;

use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// The exponential family an arm follows, with its nuisance parameter fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ArmFamily {
    /// Gaussian with known standard deviation `sigma`.
    Gaussian { sigma: f64 },
    Bernoulli,
    /// Gamma with known shape `shape`; shape 1 is the exponential family.
    Gamma { shape: f64 },
    Poisson,
}

impl fmt::Display for ArmFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArmFamily::Gaussian { sigma } => write!(f, "gaussian(sigma={sigma})"),
            ArmFamily::Bernoulli => f.write_str("bernoulli"),
            ArmFamily::Gamma { shape } => write!(f, "gamma(shape={shape})"),
            ArmFamily::Poisson => f.write_str("poisson"),
        }
    }
}

/// Which one-sided truncation of the divergence to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `d(μ, λ)` itself.
    Two,
    /// `d⁺(μ, λ) = d(μ, λ)·1{μ ≤ λ}`: deviations of the mean below `λ`.
    Plus,
    /// `d⁻(μ, λ) = d(μ, λ)·1{μ ≥ λ}`.
    Minus,
}

impl ArmFamily {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        ArmFamily::Gaussian { sigma }.validated()
    }

    pub fn gamma(shape: f64) -> Result<Self> {
        ArmFamily::Gamma { shape }.validated()
    }

    /// The exponential distribution, i.e. `Gamma { shape: 1 }`.
    pub fn exponential() -> Self {
        ArmFamily::Gamma { shape: 1.0 }
    }

    /// Checks the nuisance parameter.
    pub fn validated(self) -> Result<Self> {
        match self {
            ArmFamily::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(domain("sigma", sigma, "(0, inf)"))
            }
            ArmFamily::Gamma { shape } if !(shape > 0.0 && shape.is_finite()) => {
                Err(domain("shape", shape, "(0, inf)"))
            }
            f => Ok(f),
        }
    }

    /// Open mean domain `(lo, hi)`.
    pub fn mean_domain(&self) -> (f64, f64) {
        match self {
            ArmFamily::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            ArmFamily::Bernoulli => (0.0, 1.0),
            ArmFamily::Gamma { .. } | ArmFamily::Poisson => (0.0, f64::INFINITY),
        }
    }

    fn domain_name(&self) -> &'static str {
        match self {
            ArmFamily::Gaussian { .. } => "(-inf, inf)",
            ArmFamily::Bernoulli => "(0, 1)",
            ArmFamily::Gamma { .. } | ArmFamily::Poisson => "(0, inf)",
        }
    }

    /// Whether `mu` lies strictly inside the mean domain.
    pub fn contains(&self, mu: f64) -> bool {
        let (lo, hi) = self.mean_domain();
        mu > lo && mu < hi && mu.is_finite()
    }

    /// Whether `mu` is a possible empirical mean: the open domain plus the
    /// boundary points an empirical mean can actually hit (0 and 1 for
    /// Bernoulli, 0 for Poisson).
    pub fn contains_empirical(&self, mu: f64) -> bool {
        match self {
            ArmFamily::Bernoulli => (0.0..=1.0).contains(&mu),
            ArmFamily::Poisson => mu >= 0.0 && mu.is_finite(),
            _ => self.contains(mu),
        }
    }

    pub(crate) fn check_open(&self, what: &'static str, mu: f64) -> Result<()> {
        if self.contains(mu) {
            Ok(())
        } else {
            Err(domain(what, mu, self.domain_name()))
        }
    }

    pub(crate) fn check_empirical(&self, what: &'static str, mu: f64) -> Result<()> {
        if self.contains_empirical(mu) {
            Ok(())
        } else {
            Err(domain(what, mu, self.domain_name()))
        }
    }

    /// Variance of the family member with mean `mean`.
    pub fn variance(&self, mean: f64) -> f64 {
        match *self {
            ArmFamily::Gaussian { sigma } => sigma * sigma,
            ArmFamily::Bernoulli => mean * (1.0 - mean),
            ArmFamily::Gamma { shape } => mean * mean / shape,
            ArmFamily::Poisson => mean,
        }
    }

    /// `d(mu, lambda)`. `mu` may sit on the attainable boundary (see
    /// [`ArmFamily::contains_empirical`]); `lambda` must be inside the open
    /// domain.
    pub fn kl(&self, mu: f64, lambda: f64) -> Result<f64> {
        self.check_empirical("mu", mu)?;
        self.check_open("lambda", lambda)?;
        Ok(self.kl_unchecked(mu, lambda))
    }

    /// `d⁺(mu, lambda)`, nonzero only when `mu < lambda`.
    pub fn kl_plus(&self, mu: f64, lambda: f64) -> Result<f64> {
        self.kl_sided(mu, lambda, Side::Plus)
    }

    /// `d⁻(mu, lambda)`, nonzero only when `mu > lambda`.
    pub fn kl_minus(&self, mu: f64, lambda: f64) -> Result<f64> {
        self.kl_sided(mu, lambda, Side::Minus)
    }

    pub fn kl_sided(&self, mu: f64, lambda: f64, side: Side) -> Result<f64> {
        self.check_empirical("mu", mu)?;
        self.check_open("lambda", lambda)?;
        Ok(self.kl_sided_unchecked(mu, lambda, side))
    }

    pub(crate) fn kl_sided_unchecked(&self, mu: f64, lambda: f64, side: Side) -> f64 {
        match side {
            Side::Two => self.kl_unchecked(mu, lambda),
            Side::Plus if mu <= lambda => self.kl_unchecked(mu, lambda),
            Side::Minus if mu >= lambda => self.kl_unchecked(mu, lambda),
            _ => 0.0,
        }
    }

    pub(crate) fn kl_unchecked(&self, mu: f64, lambda: f64) -> f64 {
        let d = match *self {
            ArmFamily::Gaussian { sigma } => {
                let z = (mu - lambda) / sigma;
                0.5 * z * z
            }
            ArmFamily::Bernoulli => xlogx_ratio(mu, lambda) + xlogx_ratio(1.0 - mu, 1.0 - lambda),
            ArmFamily::Gamma { shape } => {
                // r - 1 - ln r with r = mu / lambda, written to stay accurate near r = 1
                let x = (mu - lambda) / lambda;
                shape * (x - x.ln_1p())
            }
            ArmFamily::Poisson => {
                if mu == 0.0 {
                    lambda
                } else {
                    let x = (mu - lambda) / lambda;
                    lambda * ((1.0 + x) * x.ln_1p() - x)
                }
            }
        };
        d.max(0.0)
    }

    /// Draws one observation from the member with mean `mu`.
    pub fn sample<R: Rng + ?Sized>(&self, mu: f64, rng: &mut R) -> Result<f64> {
        self.check_open("mu", mu)?;
        Ok(self.sample_unchecked(mu, rng))
    }

    pub(crate) fn sample_unchecked<R: Rng + ?Sized>(&self, mu: f64, rng: &mut R) -> f64 {
        match *self {
            ArmFamily::Gaussian { sigma } => {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                mu + sigma * z
            }
            ArmFamily::Bernoulli => {
                let b = Bernoulli::new(mu).expect("mean checked to lie in (0, 1)");
                if b.sample(rng) {
                    1.0
                } else {
                    0.0
                }
            }
            ArmFamily::Gamma { shape } => Gamma::new(shape, mu / shape)
                .expect("shape and mean checked positive")
                .sample(rng),
            ArmFamily::Poisson => Poisson::new(mu)
                .expect("mean checked positive")
                .sample(rng),
        }
    }

    pub(crate) fn same_kind(&self, other: &ArmFamily) -> bool {
        self == other
    }
}

/// `p ln(p/q)` with `0 ln 0 = 0`.
fn xlogx_ratio(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * (p / q).ln()
    }
}

/// `d(mu, lambda)` for `family`.
pub fn kl(family: &ArmFamily, mu: f64, lambda: f64) -> Result<f64> {
    family.kl(mu, lambda)
}

/// `d⁺(mu, lambda)`.
pub fn kl_plus(family: &ArmFamily, mu: f64, lambda: f64) -> Result<f64> {
    family.kl_plus(mu, lambda)
}

/// `d⁻(mu, lambda)`.
pub fn kl_minus(family: &ArmFamily, mu: f64, lambda: f64) -> Result<f64> {
    family.kl_minus(mu, lambda)
}

/// Draws one observation; deterministic given the state of `rng`.
pub fn sample<R: Rng + ?Sized>(family: &ArmFamily, mu: f64, rng: &mut R) -> Result<f64> {
    family.sample(mu, rng)
}

/// A bandit model: one family and one mean per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditModel {
    families: Vec<ArmFamily>,
    means: Vec<f64>,
}

impl BanditModel {
    pub fn new(families: Vec<ArmFamily>, means: Vec<f64>) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::Invalid("a bandit model needs at least one arm".into()));
        }
        if families.len() != means.len() {
            return Err(Error::Invalid(format!(
                "{} families for {} means",
                families.len(),
                means.len()
            )));
        }
        for (f, &m) in families.iter().zip(&means) {
            f.validated()?;
            f.check_open("mean", m)?;
        }
        Ok(BanditModel { families, means })
    }

    /// All arms from the same family.
    pub fn homogeneous(family: ArmFamily, means: Vec<f64>) -> Result<Self> {
        BanditModel::new(vec![family; means.len()], means)
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    pub fn families(&self) -> &[ArmFamily] {
        &self.families
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Draws one observation from `arm`.
    pub fn pull<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        self.families[arm].sample_unchecked(self.means[arm], rng)
    }
}

/// Per-arm pull counts `N_a` and observation sums `S_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    counts: Vec<u64>,
    sums: Vec<f64>,
}

impl SufficientStats {
    /// All-zero statistics for `num_arms` arms.
    pub fn new(num_arms: usize) -> Self {
        SufficientStats {
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
        }
    }

    pub fn from_parts(counts: Vec<u64>, sums: Vec<f64>) -> Result<Self> {
        if counts.len() != sums.len() {
            return Err(Error::Invalid(format!(
                "{} counts for {} sums",
                counts.len(),
                sums.len()
            )));
        }
        for (a, (&n, &s)) in counts.iter().zip(&sums).enumerate() {
            if !s.is_finite() {
                return Err(Error::Invalid(format!("sum of arm {a} is not finite")));
            }
            if n == 0 && s != 0.0 {
                return Err(Error::Invalid(format!(
                    "arm {a} has a nonzero sum but no observations"
                )));
            }
        }
        Ok(SufficientStats { counts, sums })
    }

    /// Statistics with the given counts and empirical means.
    pub fn from_means(counts: Vec<u64>, means: &[f64]) -> Result<Self> {
        if counts.len() != means.len() {
            return Err(Error::Invalid(format!(
                "{} counts for {} means",
                counts.len(),
                means.len()
            )));
        }
        let sums = counts
            .iter()
            .zip(means)
            .map(|(&n, &m)| if n == 0 { 0.0 } else { n as f64 * m })
            .collect();
        SufficientStats::from_parts(counts, sums)
    }

    /// Checks the family-specific constraints (`0 ≤ S_a ≤ N_a` for Bernoulli,
    /// empirical means inside the attainable domain).
    pub fn check_against(&self, families: &[ArmFamily]) -> Result<()> {
        if families.len() != self.num_arms() {
            return Err(Error::Invalid(format!(
                "{} families for {} arms",
                families.len(),
                self.num_arms()
            )));
        }
        for (a, f) in families.iter().enumerate() {
            if let Some(m) = self.mean(a) {
                f.check_empirical("empirical mean", m)?;
            }
        }
        Ok(())
    }

    pub fn observe(&mut self, arm: usize, x: f64) {
        self.counts[arm] += 1;
        self.sums[arm] += x;
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// `t = Σ_a N_a`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `S_a / N_a`, or `None` for an arm never pulled.
    pub fn mean(&self, arm: usize) -> Option<f64> {
        match self.counts[arm] {
            0 => None,
            n => Some(self.sums[arm] / n as f64),
        }
    }

    /// All empirical means; fails on the first arm without observations.
    pub fn means(&self) -> Result<Vec<f64>> {
        (0..self.num_arms())
            .map(|a| self.mean(a).ok_or(Error::EmptyArm { arm: a }))
            .collect()
    }
}

/// One side of a transportation problem: an arm with its family, its weight
/// (a pull count, or an oracle weight) and its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedArm {
    pub family: ArmFamily,
    pub weight: f64,
    pub mean: f64,
}

impl WeightedArm {
    pub fn new(family: ArmFamily, weight: f64, mean: f64) -> Self {
        WeightedArm {
            family,
            weight,
            mean,
        }
    }
}

/// Solution of the two-arm transportation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transport {
    /// Minimizing `(λ₁, λ₂)`. Equal when the constraint binds.
    pub lambda: (f64, f64),
    pub cost: f64,
}

/// `inf { n₁ d(μ₁, λ₁) + n₂ d(μ₂, λ₂) : λ₁ ≥ λ₂ }`: the cheapest way to make
/// the first arm at least as good as the second.
///
/// When `μ₁ ≥ μ₂` nothing has to move and the cost is zero. Otherwise the
/// constraint binds at a common value `λ`, and since the derivative of the
/// objective in `λ` is `(n₁(λ - μ₁) + n₂(λ - μ₂)) / V(λ)`, the minimizer is
/// the weighted mean `(n₁μ₁ + n₂μ₂) / (n₁ + n₂)`.
pub fn transport_cost(first: WeightedArm, second: WeightedArm) -> Result<Transport> {
    if !first.family.same_kind(&second.family) {
        return Err(Error::FamilyMismatch(
            first.family.to_string(),
            second.family.to_string(),
        ));
    }
    for (what, w) in [("first weight", first.weight), ("second weight", second.weight)] {
        if !(w > 0.0 && w.is_finite()) {
            return Err(domain(what, w, "(0, inf)"));
        }
    }
    first.family.check_empirical("first mean", first.mean)?;
    second.family.check_empirical("second mean", second.mean)?;
    Ok(transport_unchecked(
        &first.family,
        first.weight,
        first.mean,
        second.weight,
        second.mean,
    ))
}

/// [`transport_cost`] without validation; zero weights are allowed and make
/// the corresponding arm free to move.
pub(crate) fn transport_unchecked(
    family: &ArmFamily,
    n1: f64,
    mu1: f64,
    n2: f64,
    mu2: f64,
) -> Transport {
    if mu1 >= mu2 {
        return Transport {
            lambda: (mu1, mu2),
            cost: 0.0,
        };
    }
    if n1 <= 0.0 {
        return Transport {
            lambda: (mu2, mu2),
            cost: 0.0,
        };
    }
    if n2 <= 0.0 {
        return Transport {
            lambda: (mu1, mu1),
            cost: 0.0,
        };
    }
    let m = (n1 * mu1 + n2 * mu2) / (n1 + n2);
    // keep the meeting point strictly inside (mu1, mu2) against rounding
    let m = m.clamp(mu1, mu2);
    let cost = n1 * family.kl_unchecked(mu1, m) + n2 * family.kl_unchecked(mu2, m);
    Transport {
        lambda: (m, m),
        cost,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const G1: ArmFamily = ArmFamily::Gaussian { sigma: 1.0 };

    #[test]
    fn gaussian_kl_by_substitution() {
        assert_abs_diff_eq!(G1.kl(0.0, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        let g2 = ArmFamily::gaussian(2.0).unwrap();
        assert_abs_diff_eq!(g2.kl(0.0, 1.0).unwrap(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn kl_vanishes_on_the_diagonal() {
        for f in [G1, ArmFamily::Bernoulli, ArmFamily::gamma(2.5).unwrap(), ArmFamily::Poisson] {
            for m in [0.1, 0.5, 0.9] {
                assert_eq!(f.kl(m, m).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn bernoulli_boundary_convention() {
        let b = ArmFamily::Bernoulli;
        assert_abs_diff_eq!(b.kl(0.0, 0.3).unwrap(), -(0.7f64).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.kl(1.0, 0.3).unwrap(), -(0.3f64).ln(), epsilon = 1e-15);
        assert!(b.kl(0.3, 0.0).is_err());
        assert!(b.kl(0.3, 1.0).is_err());
        assert!(b.kl(1.2, 0.5).is_err());
        assert!(b.kl(f64::NAN, 0.5).is_err());
        assert!(G1.kl(0.0, f64::NAN).is_err());
    }

    #[test]
    fn poisson_allows_zero_empirical_mean() {
        let p = ArmFamily::Poisson;
        assert_abs_diff_eq!(p.kl(0.0, 2.0).unwrap(), 2.0, epsilon = 1e-15);
        assert!(p.kl(1.0, 0.0).is_err());
        assert!(ArmFamily::exponential().kl(0.0, 1.0).is_err());
    }

    #[test]
    fn gamma_and_poisson_closed_forms() {
        let g = ArmFamily::gamma(2.0).unwrap();
        let r: f64 = 3.0 / 1.5;
        assert_abs_diff_eq!(g.kl(3.0, 1.5).unwrap(), 2.0 * (r - 1.0 - r.ln()), epsilon = 1e-14);
        let p = ArmFamily::Poisson;
        let v = 1.5 - 3.0 + 3.0 * (2.0f64).ln();
        assert_abs_diff_eq!(p.kl(3.0, 1.5).unwrap(), v, epsilon = 1e-14);
    }

    #[test]
    fn one_sided_divergences() {
        assert_eq!(G1.kl_plus(0.0, 1.0).unwrap(), 0.5);
        assert_eq!(G1.kl_minus(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(G1.kl_plus(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(G1.kl_minus(1.0, 0.0).unwrap(), 0.5);
        assert_eq!(G1.kl_plus(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(G1.kl_minus(0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn invalid_nuisance_parameters() {
        assert!(ArmFamily::gaussian(0.0).is_err());
        assert!(ArmFamily::gaussian(-1.0).is_err());
        assert!(ArmFamily::gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn sampling_rejects_boundary_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(ArmFamily::Bernoulli.sample(0.0, &mut rng).is_err());
        assert!(ArmFamily::Poisson.sample(-1.0, &mut rng).is_err());
    }

    #[test]
    fn sampling_is_deterministic_given_the_seed() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5)
                .map(|_| ArmFamily::gamma(2.0).unwrap().sample(3.0, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn transport_examples() {
        let t = transport_cost(WeightedArm::new(G1, 10.0, 0.0), WeightedArm::new(G1, 30.0, 1.0))
            .unwrap();
        assert_abs_diff_eq!(t.lambda.0, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(t.cost, 3.75, epsilon = 1e-12);

        let t = transport_cost(WeightedArm::new(G1, 5.0, 0.4), WeightedArm::new(G1, 5.0, 0.4))
            .unwrap();
        assert_eq!(t.lambda, (0.4, 0.4));
        assert_eq!(t.cost, 0.0);
    }

    #[test]
    fn transport_errors() {
        let b = ArmFamily::Bernoulli;
        assert!(matches!(
            transport_cost(WeightedArm::new(G1, 1.0, 0.2), WeightedArm::new(b, 1.0, 0.4)),
            Err(Error::FamilyMismatch(..))
        ));
        assert!(transport_cost(WeightedArm::new(b, 0.0, 0.2), WeightedArm::new(b, 1.0, 0.4)).is_err());
    }

    #[test]
    fn sufficient_stats_invariants() {
        assert!(SufficientStats::from_parts(vec![0, 2], vec![1.0, 1.0]).is_err());
        let mut s = SufficientStats::new(2);
        s.observe(1, 3.0);
        s.observe(1, 1.0);
        assert_eq!(s.mean(0), None);
        assert_eq!(s.mean(1), Some(2.0));
        assert_eq!(s.total(), 2);
        assert!(matches!(s.means(), Err(Error::EmptyArm { arm: 0 })));
        let bern = SufficientStats::from_parts(vec![2], vec![3.0]).unwrap();
        assert!(bern.check_against(&[ArmFamily::Bernoulli]).is_err());
    }
}
