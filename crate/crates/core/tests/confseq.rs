use banditconf::confseq::{
    box_ci_linear, ellipse_ci_linear, min_lcb, min_ucb, region_contains, ConfidenceQuery,
    PriorKind, SubsetPrior,
};
use banditconf::expfam::{ArmFamily, BanditModel, Side, SufficientStats};
use banditconf::thresholds::{c_g, GFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prior_kind() -> impl Strategy<Value = PriorKind> {
    prop_oneof![
        Just(PriorKind::Box),
        Just(PriorKind::Full),
        Just(PriorKind::UniformSizes),
        Just(PriorKind::Zipf),
    ]
}

fn bernoulli_stats(means: &[f64], counts: &[u64]) -> SufficientStats {
    // round the sums so that the empirical means are attainable
    let sums = means
        .iter()
        .zip(counts)
        .map(|(m, &n)| (m * n as f64).round())
        .collect();
    SufficientStats::from_parts(counts.to_vec(), sums).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sorted_membership_matches_every_subset(
        k in 1usize..=8,
        kind in prior_kind(),
        seed in any::<u64>(),
        side_two in any::<bool>(),
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..0.9)).collect();
        let counts: Vec<u64> = (0..k).map(|_| rng.random_range(1..500)).collect();
        let stats = bernoulli_stats(&means, &counts);
        let families = vec![ArmFamily::Bernoulli; k];
        let prior = kind.prior(k).unwrap();
        let side = if side_two { Side::Two } else { Side::Plus };
        let q = ConfidenceQuery::new(&stats, &families, 0.05, &prior, side);
        let lambda: Vec<f64> = (0..k).map(|_| rng.random_range(0.02..0.98)).collect();

        let contribs = q.contributions(&lambda).unwrap();
        let thresholds = q.size_thresholds();
        let exhaustive = (1u32..(1 << k)).all(|mask| {
            let members: Vec<usize> = (0..k).filter(|a| mask & (1 << a) != 0).collect();
            let sum: f64 = members.iter().map(|&a| contribs[a]).sum();
            sum <= thresholds[members.len() - 1]
        });
        prop_assert_eq!(region_contains(&q, &lambda).unwrap(), exhaustive);
    }

    #[test]
    fn regions_shrink_as_delta_grows(
        k in 1usize..=5,
        seed in any::<u64>(),
        kind in prior_kind(),
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..0.9)).collect();
        let counts: Vec<u64> = (0..k).map(|_| rng.random_range(1..500)).collect();
        let stats = bernoulli_stats(&means, &counts);
        let families = vec![ArmFamily::Bernoulli; k];
        let prior = kind.prior(k).unwrap();
        let lambda: Vec<f64> = (0..k).map(|_| rng.random_range(0.02..0.98)).collect();
        let inside = |delta: f64| {
            region_contains(&ConfidenceQuery::new(&stats, &families, delta, &prior, Side::Two), &lambda).unwrap()
        };
        // inside at a large δ implies inside at every smaller δ
        if inside(0.2) {
            prop_assert!(inside(0.01));
            prop_assert!(inside(1e-6));
        }
    }

    #[test]
    fn bounds_bracket_the_smallest_empirical_mean(
        k in 1usize..=6,
        seed in any::<u64>(),
        kind in prior_kind(),
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..0.95)).collect();
        let counts: Vec<u64> = (0..k).map(|_| rng.random_range(5..2000)).collect();
        let stats = bernoulli_stats(&means, &counts);
        let families = vec![ArmFamily::Bernoulli; k];
        let prior = kind.prior(k).unwrap();
        let emp_min = stats.means().unwrap().into_iter().fold(f64::INFINITY, f64::min);
        let lcb = min_lcb(&stats, &families, 0.05).unwrap();
        let ucb = min_ucb(&stats, &families, 0.05, &prior).unwrap().value;
        prop_assert!(lcb <= emp_min + 1e-12);
        prop_assert!(emp_min <= ucb + 1e-12);
    }

    #[test]
    fn ucb_shrinks_with_more_samples_at_fixed_means(
        k in 1usize..=5,
        seed in any::<u64>(),
        kind in prior_kind(),
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..0.6)).collect();
        let families = vec![ArmFamily::Bernoulli; k];
        let prior = kind.prior(k).unwrap();
        let mut last = f64::INFINITY;
        for n in [100u64, 1000, 10_000, 100_000] {
            let stats = SufficientStats::from_means(vec![n; k], &means).unwrap();
            let u = min_ucb(&stats, &families, 0.01, &prior).unwrap().value;
            prop_assert!(u <= last + 1e-12);
            last = u;
        }
    }
}

fn gaussian_stats(means: &[f64], counts: &[u64]) -> SufficientStats {
    SufficientStats::from_means(counts.to_vec(), means).unwrap()
}

#[test]
fn box_interval_matches_coordinate_extremes() {
    let families = vec![
        ArmFamily::Gaussian { sigma: 1.0 },
        ArmFamily::Gaussian { sigma: 0.5 },
        ArmFamily::Gaussian { sigma: 2.0 },
    ];
    let means = [0.3, -1.0, 2.0];
    let stats = gaussian_stats(&means, &[40, 120, 15]);
    let prior = SubsetPrior::box_prior(3).unwrap();
    let delta: f64 = 0.05;
    let q = ConfidenceQuery::new(&stats, &families, delta, &prior, Side::Two);
    // largest excursion of each coordinate alone that stays in the region
    let radius = |a: usize| {
        let (mut lo, mut hi) = (0.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let mut lambda = means.to_vec();
            lambda[a] += mid;
            if region_contains(&q, &lambda).unwrap() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let radii: Vec<f64> = (0..3).map(radius).collect();
    for coeffs in [[1.0, 0.0, 0.0], [1.0, -1.0, 0.5], [-2.0, 0.3, 1.0]] {
        let (lo, hi) = box_ci_linear(&coeffs, &stats, &families, delta).unwrap();
        let center: f64 = coeffs.iter().zip(&means).map(|(c, m)| c * m).sum();
        let half: f64 = coeffs.iter().zip(&radii).map(|(c, r)| c.abs() * r).sum();
        assert!((hi - (center + half)).abs() <= 1e-9, "{hi} vs {}", center + half);
        assert!((lo - (center - half)).abs() <= 1e-9);
    }
}

/// Maximizes `cᵀλ` over `{Σ q_a (λ_a - m_a)² ≤ budget}` by projected
/// gradient ascent; the projection solves for its multiplier by bisection.
fn ellipse_max_projected_gradient(c: &[f64], m: &[f64], q: &[f64], budget: f64) -> f64 {
    let project = |y: &[f64]| -> Vec<f64> {
        let excess = |nu: f64| {
            y.iter()
                .zip(m)
                .zip(q)
                .map(|((yi, mi), qi)| qi * ((yi - mi) / (1.0 + nu * qi)).powi(2))
                .sum::<f64>()
                - budget
        };
        if excess(0.0) <= 0.0 {
            return y.to_vec();
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while excess(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        y.iter()
            .zip(m)
            .zip(q)
            .map(|((yi, mi), qi)| mi + (yi - mi) / (1.0 + hi * qi))
            .collect()
    };
    let mut x = m.to_vec();
    for it in 0..20_000 {
        let step = 1.0 / (1.0 + it as f64).sqrt();
        let y: Vec<f64> = x.iter().zip(c).map(|(xi, ci)| xi + step * ci).collect();
        x = project(&y);
    }
    x.iter().zip(c).map(|(xi, ci)| xi * ci).sum()
}

#[test]
fn ellipse_interval_matches_projected_gradient() {
    let sigmas = [1.0, 0.5, 2.0];
    let families: Vec<ArmFamily> = sigmas.iter().map(|&sigma| ArmFamily::Gaussian { sigma }).collect();
    let means = [0.3, -1.0, 2.0];
    let counts = [40u64, 120, 15];
    let stats = gaussian_stats(&means, &counts);
    let delta: f64 = 0.05;
    let k = 3.0;
    let budget = k * c_g(GFunction::Gaussian, (1.0 / delta).ln() / k).unwrap()
        + counts
            .iter()
            .map(|&n| 2.0 * (4.0 + (n as f64).ln()).ln())
            .sum::<f64>();
    let q: Vec<f64> = sigmas
        .iter()
        .zip(&counts)
        .map(|(s, &n)| n as f64 / (2.0 * s * s))
        .collect();
    for coeffs in [[1.0, 0.0, 0.0], [1.0, -1.0, 0.5], [-2.0, 0.3, 1.0]] {
        let (lo, hi) = ellipse_ci_linear(&coeffs, &stats, &families, delta).unwrap();
        let top = ellipse_max_projected_gradient(&coeffs, &means, &q, budget);
        let neg: Vec<f64> = coeffs.iter().map(|c| -c).collect();
        let bottom = -ellipse_max_projected_gradient(&neg, &means, &q, budget);
        assert!((hi - top).abs() <= 1e-4, "{hi} vs {top}");
        assert!((lo - bottom).abs() <= 1e-4, "{lo} vs {bottom}");
    }
}

#[test]
fn ellipse_beats_box_with_many_arms() {
    let k = 10;
    let families = vec![ArmFamily::Gaussian { sigma: 1.0 }; k];
    let means: Vec<f64> = (0..k).map(|a| a as f64 / 10.0).collect();
    let stats = gaussian_stats(&means, &vec![100; k]);
    let coeffs = vec![1.0; k];
    let (blo, bhi) = box_ci_linear(&coeffs, &stats, &families, 1e-10).unwrap();
    let (elo, ehi) = ellipse_ci_linear(&coeffs, &stats, &families, 1e-10).unwrap();
    assert!(ehi - elo < bhi - blo);
}

#[test]
fn bernoulli_lcb_solves_its_equation() {
    let counts = vec![50u64, 400, 3000];
    let means = [0.3, 0.2, 0.45];
    let stats = SufficientStats::from_means(counts.clone(), &means).unwrap();
    let families = vec![ArmFamily::Bernoulli; 3];
    let delta: f64 = 0.05;
    let lcb = min_lcb(&stats, &families, delta).unwrap();
    let level = |n: u64| {
        3.0 * (1.0 + (n as f64).ln()).ln()
            + banditconf::thresholds::universal_threshold((3.0 / delta).ln(), banditconf::thresholds::Sides::One)
                .unwrap()
    };
    // the bound is attained by one arm, and every other arm stops above it
    let residuals: Vec<f64> = (0..3)
        .map(|a| {
            let n = counts[a];
            n as f64 * ArmFamily::Bernoulli.kl(means[a], lcb).unwrap() - level(n)
        })
        .collect();
    let attained = residuals.iter().cloned().fold(f64::INFINITY, |x, r| x.min(r.abs()));
    assert!(attained <= 1e-6, "{residuals:?}");
    assert!(residuals.iter().all(|&r| r >= -1e-6));
}

#[test]
fn intervals_cover_the_smallest_mean() {
    let means = vec![0.0, 0.5, 1.0];
    let model = BanditModel::homogeneous(ArmFamily::Gaussian { sigma: 1.0 }, means.clone()).unwrap();
    let families = model.families().to_vec();
    let prior = SubsetPrior::uniform_sizes(3).unwrap();
    let delta = 0.1;
    let reps = 2000;
    let mut misses_low = 0;
    let mut misses_high = 0;
    for r in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(r);
        let mut stats = SufficientStats::new(3);
        for t in 0..2000 {
            let a = t % 3;
            stats.observe(a, model.pull(a, &mut rng));
        }
        if min_lcb(&stats, &families, delta).unwrap() > 0.0 {
            misses_low += 1;
        }
        if min_ucb(&stats, &families, delta, &prior).unwrap().value < 0.0 {
            misses_high += 1;
        }
    }
    assert!(misses_low as f64 / reps as f64 <= delta);
    assert!(misses_high as f64 / reps as f64 <= delta);
}
