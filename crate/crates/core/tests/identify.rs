use banditconf::expfam::{ArmFamily, BanditModel, SufficientStats};
use banditconf::identify::{
    glr_statistic, oracle_value, oracle_weights, replication_seed, run_episode, tracking_floor,
    tracking_step, EpisodeConfig, IdentificationProblem, SamplingRule,
};
use banditconf::thresholds::StoppingThreshold;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[test]
fn oracle_weights_beat_random_weights() {
    let instances = [
        (
            IdentificationProblem::BestArm { arms: 3 },
            BanditModel::homogeneous(ArmFamily::Bernoulli, vec![0.5, 0.45, 0.3]).unwrap(),
        ),
        (
            IdentificationProblem::BestArm { arms: 4 },
            BanditModel::homogeneous(ArmFamily::Poisson, vec![1.0, 2.5, 2.0, 0.5]).unwrap(),
        ),
        (
            IdentificationProblem::LargestProfit { pairs: 2 },
            BanditModel::homogeneous(ArmFamily::Gaussian { sigma: 1.0 }, vec![1.0, 0.0, 0.0, 0.0]).unwrap(),
        ),
        (
            IdentificationProblem::LargestProfit { pairs: 2 },
            BanditModel::homogeneous(ArmFamily::Bernoulli, vec![0.7, 0.3, 0.5, 0.4]).unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (problem, model) in instances {
        let sol = oracle_weights(&problem, &model).unwrap();
        let best = oracle_value(&problem, &model, &sol.weights).unwrap();
        assert!((1.0 / best - sol.characteristic_time).abs() <= 1e-6 * sol.characteristic_time);
        for _ in 0..1000 {
            let w = random_simplex(&mut rng, model.num_arms());
            let v = oracle_value(&problem, &model, &w).unwrap();
            assert!(best >= v - 1e-6, "{problem:?}: F(w*) = {best} < F(w) = {v}");
        }
    }
}

#[test]
fn two_gaussian_arms_saddle_point() {
    let model = BanditModel::homogeneous(ArmFamily::Gaussian { sigma: 1.0 }, vec![1.0, 0.0]).unwrap();
    let problem = IdentificationProblem::BestArm { arms: 2 };
    let sol = oracle_weights(&problem, &model).unwrap();
    // F(w, 1-w) = w(1-w)/2 on the Gaussian pair: maximized at 1/2 with value 1/8
    let n = 100_000;
    let (arg, val) = (1..n)
        .map(|i| i as f64 / n as f64)
        .map(|w| (w, oracle_value(&problem, &model, &[w, 1.0 - w]).unwrap()))
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    assert!((sol.weights[0] - arg).abs() <= 1e-4);
    assert!((1.0 / val - 8.0).abs() <= 1e-6);
    assert!((sol.characteristic_time - 8.0).abs() <= 1e-6);
}

#[test]
fn well_separated_arms_stop_quickly() {
    let model = BanditModel::homogeneous(ArmFamily::Gaussian { sigma: 1.0 }, vec![10.0, 0.0]).unwrap();
    let problem = IdentificationProblem::BestArm { arms: 2 };
    let seeds = 200;
    let fast = (0..seeds)
        .filter(|&s| {
            let ep = EpisodeConfig::new(
                problem,
                model.clone(),
                SamplingRule::Tracking,
                StoppingThreshold::BaiImproved { arms: 2 },
                0.05,
                replication_seed(31, s),
                10_000,
            );
            let rec = run_episode(&ep).unwrap();
            rec.tau < 100 && !rec.is_error()
        })
        .count();
    assert!(fast as f64 >= 0.99 * seeds as f64, "{fast} of {seeds}");
}

#[test]
fn episodes_replay_exactly() {
    let model = BanditModel::homogeneous(ArmFamily::Bernoulli, vec![0.6, 0.4, 0.3]).unwrap();
    let mut ep = EpisodeConfig::new(
        IdentificationProblem::BestArm { arms: 3 },
        model,
        SamplingRule::Tracking,
        StoppingThreshold::Universal { arms: 3 },
        0.1,
        99,
        100_000,
    );
    ep.record_trace = true;
    let a = run_episode(&ep).unwrap();
    let b = run_episode(&ep.clone()).unwrap();
    assert_eq!(a, b);
    let trace = a.trace.as_ref().unwrap();
    assert_eq!(trace.len() as u64, a.tau);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tracking_never_leaves_an_arm_below_the_floor(
        k in 2usize..=6,
        seed in any::<u64>(),
        steps in 50u64..3000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![1u64; k];
        for t in (k as u64)..steps {
            // adversarial targets that change every round
            let mut w = random_simplex(&mut rng, k);
            w[0] += 50.0;
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let a = tracking_step(&counts, &w);
            counts[a] += 1;
            let floor = tracking_floor(t + 1, k);
            prop_assert!(counts.iter().all(|&n| n as f64 >= floor));
        }
    }

    #[test]
    fn glr_is_below_every_alternative(
        seed in any::<u64>(),
        k in 2usize..=5,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..0.95)).collect();
        let counts: Vec<u64> = (0..k).map(|_| rng.random_range(1..100)).collect();
        let stats = SufficientStats::from_means(counts.clone(), &means).unwrap();
        let fams = vec![ArmFamily::Bernoulli; k];
        let problem = IdentificationProblem::BestArm { arms: k };
        let glr = glr_statistic(&problem, &stats, &fams).unwrap();
        let best = glr.answer.unwrap();
        for _ in 0..50 {
            let lambda: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..0.99)).collect();
            if problem.answer(&lambda) == Some(best) {
                continue;
            }
            let cost: f64 = (0..k)
                .map(|a| counts[a] as f64 * ArmFamily::Bernoulli.kl(means[a], lambda[a]).unwrap())
                .sum();
            prop_assert!(glr.value <= cost + 1e-9);
        }
    }
}
