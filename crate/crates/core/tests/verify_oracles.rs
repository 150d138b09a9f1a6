use kuniform::game::{decode_profile, Evaluator};
use kuniform::verify::{ce_regret, ce_regrets, check_ir, check_weak_nash, ir_level, nash_regret, IrMethod};
use kuniform::{CorrelatedDistribution, ExplicitGame, Game, MixedProfile, MixedStrategy, PureProfile};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Expected payoff of `player` by summing over every pure outcome.
fn brute_payoff(game: &ExplicitGame<f64>, profile: &MixedProfile<f64>, player: usize) -> f64 {
    let (n, m) = (game.num_players(), game.num_actions());
    (0..(m as u128).pow(n as u32))
        .map(|idx| {
            let a = decode_profile(idx, n, m);
            let w: f64 = a.iter().enumerate().map(|(i, &ai)| profile.strategy(i).prob(ai)).product();
            w * game.payoff(player, &a)
        })
        .sum()
}

fn brute_nash_regret(game: &ExplicitGame<f64>, profile: &MixedProfile<f64>, player: usize) -> f64 {
    let m = game.num_actions();
    let base = brute_payoff(game, profile, player);
    (0..m)
        .map(|a| brute_payoff(game, &profile.with_strategy(player, MixedStrategy::pure(m, a)), player) - base)
        .fold(0.0, f64::max)
}

/// Best gain over all `m^m` switching functions.
fn brute_internal(game: &ExplicitGame<f64>, dist: &CorrelatedDistribution<f64>, player: usize) -> f64 {
    let m = game.num_actions();
    let mut best = 0.0f64;
    for code in 0..m.pow(m as u32) {
        let f: Vec<usize> = (0..m).map(|r| (code / m.pow(r as u32)) % m).collect();
        let gain: f64 = dist
            .support()
            .iter()
            .map(|(a, w)| {
                let mut dev = a.0.clone();
                dev[player] = f[a.0[player]];
                w * (game.payoff(player, &dev) - game.payoff(player, &a.0))
            })
            .sum();
        best = best.max(gain);
    }
    best
}

fn random_profile(rng: &mut ChaCha8Rng, n: usize, m: usize) -> MixedProfile<f64> {
    MixedProfile::new(
        (0..n)
            .map(|_| {
                let w: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() + 0.01).collect();
                let s: f64 = w.iter().sum();
                MixedStrategy::new(w.into_iter().map(|v| v / s).collect()).unwrap()
            })
            .collect(),
    )
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize, m: usize, support: usize) -> CorrelatedDistribution<f64> {
    let mut entries: Vec<(PureProfile, f64)> = Vec::new();
    while entries.len() < support {
        let a = PureProfile((0..n).map(|_| rng.gen_range(0..m)).collect());
        if entries.iter().all(|(b, _)| *b != a) {
            entries.push((a, rng.gen::<f64>() + 0.05));
        }
    }
    let s: f64 = entries.iter().map(|e| e.1).sum();
    CorrelatedDistribution::new(entries.into_iter().map(|(a, w)| (a, w / s)).collect()).unwrap()
}

#[test]
fn nash_regret_random_three_by_three_by_three() {
    let g = ExplicitGame::<f64>::random(3, 3, 11).unwrap();
    let profile = MixedProfile::uniform(3, 3);
    for i in 0..3 {
        let r = nash_regret(&g, &profile, i, Evaluator::Exact).unwrap();
        assert!((r - brute_nash_regret(&g, &profile, i)).abs() < 1e-9);
    }
}

#[test]
fn ce_regret_random_support_four() {
    let g = ExplicitGame::<f64>::random(3, 3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = random_distribution(&mut rng, 3, 3, 4);
    for i in 0..3 {
        let r = ce_regret(&g, &d, i).unwrap();
        assert!((r.internal - brute_internal(&g, &d, i)).abs() < 1e-9);
    }
}

#[test]
fn weak_nash_threshold_arithmetic() {
    // Ten independent one-player games; player 0 alone sits at regret 0.5.
    let g = ExplicitGame::<f64>::new(1, 2, vec![0.0, 1.0]).unwrap();
    let at_half = MixedProfile::new(vec![MixedStrategy::binary(0.5).unwrap()]);
    assert_eq!(nash_regret(&g, &at_half, 0, Evaluator::Exact).unwrap(), 0.5);
    let r = kuniform::verify::RegretReport::new(
        std::iter::once(0.5).chain(std::iter::repeat_n(0.0, 9)).collect::<Vec<f64>>(),
        0.1,
    );
    assert!(r.weak_pass(0.1));
    assert!(!r.weak_pass(0.05));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nash_regret_matches_brute_force(seed in 0u64..10_000, n in 1usize..=4, m in 2usize..=3) {
        let g = ExplicitGame::<f64>::random(n, m, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let profile = random_profile(&mut rng, n, m);
        for i in 0..n {
            let r = nash_regret(&g, &profile, i, Evaluator::Exact).unwrap();
            prop_assert!((r - brute_nash_regret(&g, &profile, i)).abs() < 1e-9);
        }
    }

    #[test]
    fn ce_regret_matches_switching_scan(seed in 0u64..10_000, n in 1usize..=4, m in 2usize..=3, support in 1usize..=6) {
        let g = ExplicitGame::<f64>::random(n, m, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xce);
        let support = support.min(m.pow(n as u32));
        let d = random_distribution(&mut rng, n, m, support);
        for (i, r) in ce_regrets(&g, &d).unwrap().into_iter().enumerate() {
            prop_assert!((r.internal - brute_internal(&g, &d, i)).abs() < 1e-9);
            prop_assert!(r.external <= r.internal + 1e-12);
        }
    }

    #[test]
    fn point_mass_ce_regret_is_pure_nash_regret(seed in 0u64..10_000, n in 1usize..=4, m in 2usize..=3) {
        let g = ExplicitGame::<f64>::random(n, m, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let d = CorrelatedDistribution::point_mass(PureProfile(a.clone()));
        let pure = MixedProfile::from_pure(&a, m);
        for i in 0..n {
            let ce = ce_regret(&g, &d, i).unwrap();
            let nash = nash_regret(&g, &pure, i, Evaluator::Exact).unwrap();
            prop_assert!((ce.internal - nash).abs() < 1e-12);
            prop_assert!((ce.external - nash).abs() < 1e-12);
        }
    }

    #[test]
    fn ir_check_is_monotone_in_epsilon(seed in 0u64..10_000, support in 1usize..=5, eps in 0.0f64..0.5, extra in 0.0f64..0.5) {
        let g = ExplicitGame::<f64>::random(3, 2, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_distribution(&mut rng, 3, 2, support);
        let low = check_ir(&g, &d, eps, IrMethod::Exact).unwrap().passed;
        let high = check_ir(&g, &d, eps + extra, IrMethod::Exact).unwrap().passed;
        prop_assert!(!low || high);
    }

    #[test]
    fn approximate_ce_is_individually_rational(seed in 0u64..10_000, support in 1usize..=8) {
        let g = ExplicitGame::<f64>::random(3, 2, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1e);
        let d = random_distribution(&mut rng, 3, 2, support);
        let eps = ce_regrets(&g, &d).unwrap().iter().map(|r| r.internal).fold(0.0, f64::max);
        prop_assert!(check_ir(&g, &d, eps, IrMethod::Exact).unwrap().passed);
    }

    #[test]
    fn ir_level_matches_grid_maximin(seed in 0u64..10_000, n in 1usize..=3) {
        let g = ExplicitGame::<f64>::random(n, 2, seed).unwrap();
        let opponents = 1u128 << (n - 1);
        let steps = 20_000;
        for i in 0..n {
            let grid_best = (0..=steps)
                .map(|s| {
                    let p = s as f64 / steps as f64;
                    (0..opponents)
                        .map(|o| {
                            let mut a = decode_profile(o, n - 1, 2);
                            a.insert(i, 0);
                            let u0 = g.payoff(i, &a);
                            a[i] = 1;
                            p * u0 + (1.0 - p) * g.payoff(i, &a)
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let v = ir_level(&g, i, IrMethod::Exact).unwrap();
            // Payoffs lie in [0, 1], so the grid loses at most 1/steps.
            prop_assert!(v >= grid_best - 1e-9 && v <= grid_best + 1.0 / steps as f64 + 1e-9);
        }
    }
}

#[test]
fn exact_equilibrium_passes_weak_nash_everywhere() {
    let g = ExplicitGame::<f64>::matching_pennies();
    let half = MixedProfile::uniform(2, 2);
    for (eps, delta) in [(0.0, 0.0), (0.1, 0.5), (0.9, 0.9)] {
        assert!(check_weak_nash(&g, &half, eps, delta, Evaluator::Exact).unwrap().0);
    }
}
