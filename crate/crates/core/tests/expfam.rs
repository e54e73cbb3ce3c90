use banditconf::expfam::{transport_cost, ArmFamily, BanditModel, SufficientStats, WeightedArm};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family() -> impl Strategy<Value = ArmFamily> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|sigma| ArmFamily::Gaussian { sigma }),
        Just(ArmFamily::Bernoulli),
        (0.2f64..6.0).prop_map(|shape| ArmFamily::Gamma { shape }),
        Just(ArmFamily::Poisson),
    ]
}

/// A point of the open mean domain, from a uniform `u ∈ (0, 1)`.
fn mean_at(fam: ArmFamily, u: f64) -> f64 {
    match fam {
        ArmFamily::Gaussian { .. } => 10.0 * (u - 0.5),
        ArmFamily::Bernoulli => u,
        ArmFamily::Gamma { .. } | ArmFamily::Poisson => 10.0 * u,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn divergence_is_nonnegative_and_splits_by_side(
        fam in family(),
        u in 0.01f64..0.99,
        v in 0.01f64..0.99,
    ) {
        let (mu, lambda) = (mean_at(fam, u), mean_at(fam, v));
        let d = fam.kl(mu, lambda).unwrap();
        prop_assert!(d >= 0.0);
        let plus = fam.kl_plus(mu, lambda).unwrap();
        let minus = fam.kl_minus(mu, lambda).unwrap();
        prop_assert!(plus == 0.0 || minus == 0.0);
        prop_assert!((plus + minus - d).abs() <= 1e-12 * (1.0 + d));
        if mu != lambda {
            prop_assert!(d > 0.0);
        }
    }

    #[test]
    fn divergence_grows_away_from_the_mean(
        fam in family(),
        u in 0.05f64..0.95,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        // λ₁ between μ and λ₂ on the same side
        let mu = mean_at(fam, u);
        let far = mean_at(fam, u + (0.99 - u) * b.max(a));
        let near = mean_at(fam, u + (0.99 - u) * b.min(a));
        prop_assert!(fam.kl(mu, near).unwrap() <= fam.kl(mu, far).unwrap() + 1e-12);
    }

    #[test]
    fn transport_is_a_minimum_over_feasible_pairs(
        fam in family(),
        u1 in 0.02f64..0.98,
        u2 in 0.02f64..0.98,
        w1 in 0.1f64..100.0,
        w2 in 0.1f64..100.0,
        s in 0.0f64..1.0,
        t in 0.0f64..1.0,
    ) {
        let (m1, m2) = (mean_at(fam, u1), mean_at(fam, u2));
        let tr = transport_cost(WeightedArm::new(fam, w1, m1), WeightedArm::new(fam, w2, m2)).unwrap();
        prop_assert!(tr.cost >= 0.0);
        prop_assert!(tr.lambda.0 >= tr.lambda.1 - 1e-12);
        let attained = w1 * fam.kl(m1, tr.lambda.0).unwrap() + w2 * fam.kl(m2, tr.lambda.1).unwrap();
        prop_assert!((attained - tr.cost).abs() <= 1e-9 * (1.0 + tr.cost));
        // any feasible (λ₁ ≥ λ₂) costs at least as much
        let lo = mean_at(fam, 0.01 + 0.98 * s.min(t));
        let hi = mean_at(fam, 0.01 + 0.98 * s.max(t));
        let other = w1 * fam.kl(m1, hi).unwrap() + w2 * fam.kl(m2, lo).unwrap();
        prop_assert!(other >= tr.cost - 1e-9 * (1.0 + tr.cost));
    }

    #[test]
    fn sufficient_statistics_track_observations(
        xs in proptest::collection::vec((0usize..3, -5.0f64..5.0), 1..200),
    ) {
        let mut stats = SufficientStats::new(3);
        for &(a, x) in &xs {
            stats.observe(a, x);
        }
        prop_assert_eq!(stats.total(), xs.len() as u64);
        for a in 0..3 {
            let own: Vec<f64> = xs.iter().filter(|p| p.0 == a).map(|p| p.1).collect();
            prop_assert_eq!(stats.count(a), own.len() as u64);
            match stats.mean(a) {
                None => prop_assert!(own.is_empty()),
                Some(m) => {
                    let expected = own.iter().sum::<f64>() / own.len() as f64;
                    prop_assert!((m - expected).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn transport_against_a_grid() {
    let cases = [
        (ArmFamily::Bernoulli, 0.2, 3.0, 0.7, 5.0),
        (ArmFamily::Poisson, 1.0, 10.0, 4.0, 2.0),
        (ArmFamily::Gaussian { sigma: 2.0 }, -1.0, 1.0, 2.5, 7.0),
        (ArmFamily::Gamma { shape: 3.0 }, 0.5, 4.0, 2.0, 4.0),
    ];
    for (fam, m1, w1, m2, w2) in cases {
        let tr = transport_cost(WeightedArm::new(fam, w1, m1), WeightedArm::new(fam, w2, m2)).unwrap();
        let n = 1_000_000;
        let grid = (0..=n)
            .map(|i| m1 + (m2 - m1) * i as f64 / n as f64)
            .map(|l| w1 * fam.kl(m1, l).unwrap() + w2 * fam.kl(m2, l).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((tr.cost - grid).abs() <= 1e-6, "{fam}: {} vs {grid}", tr.cost);
    }
}

#[test]
fn sampled_moments_match_the_family() {
    let cases = [
        (ArmFamily::Gaussian { sigma: 2.0 }, 1.5),
        (ArmFamily::Bernoulli, 0.3),
        (ArmFamily::Gamma { shape: 2.5 }, 4.0),
        (ArmFamily::Poisson, 3.0),
    ];
    let n = 1_000_000;
    for (fam, mu) in cases {
        let model = BanditModel::homogeneous(fam, vec![mu]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..n).map(|_| model.pull(0, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let v = fam.variance(mu);
        // five standard errors for the mean; a loose relative band for the variance
        assert!((mean - mu).abs() <= 5.0 * (v / n as f64).sqrt(), "{fam}: mean {mean}");
        assert!((var / v - 1.0).abs() <= 0.01, "{fam}: variance {var} vs {v}");
    }
}
