use rayon::prelude::*;

use super::{check_threshold, clamp_regret, RegretReport};
use crate::game::{deviation_values, mix, Evaluator, Game, MixedProfile};
use crate::{Result, Scalar};

/// `max_a u_i(a, x_{-i}) − u_i(x)`, clamped below at zero.
pub fn nash_regret<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    player: usize,
    evaluator: Evaluator,
) -> Result<T> {
    let values = deviation_values(game, profile, player, evaluator)?;
    let best = values.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(clamp_regret(best - mix(profile.strategy(player), &values)))
}

/// Regrets of all players, computed in parallel and returned in player order.
pub fn nash_regrets<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    evaluator: Evaluator,
) -> Result<Vec<T>> {
    profile.validate(game.num_players(), game.num_actions())?;
    (0..game.num_players())
        .into_par_iter()
        .map(|i| nash_regret(game, profile, i, evaluator))
        .collect()
}

/// `(ε, δ)`-weak approximate Nash test; `δ = 0` is the plain ε-Nash test.
pub fn check_weak_nash<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    epsilon: f64,
    delta: f64,
    evaluator: Evaluator,
) -> Result<(bool, RegretReport<T>)> {
    check_threshold(epsilon, delta)?;
    let report = RegretReport::new(nash_regrets(game, profile, evaluator)?, T::lit(epsilon));
    Ok((report.weak_pass(delta), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ExplicitGame, MixedStrategy};

    #[test]
    fn matching_pennies_half_is_exact() {
        let g = ExplicitGame::<f64>::matching_pennies();
        let p = MixedProfile::uniform(2, 2);
        for i in 0..2 {
            assert_eq!(nash_regret(&g, &p, i, Evaluator::Exact).unwrap(), 0.0);
        }
        let (ok, _) = check_weak_nash(&g, &p, 0.0, 0.0, Evaluator::Exact).unwrap();
        assert!(ok);
    }

    #[test]
    fn matching_pennies_pure_loser_regret_one() {
        let g = ExplicitGame::<f64>::matching_pennies();
        let p = MixedProfile::from_pure(&[0, 0], 2);
        assert_eq!(nash_regret(&g, &p, 0, Evaluator::Exact).unwrap(), 0.0);
        assert_eq!(nash_regret(&g, &p, 1, Evaluator::Exact).unwrap(), 1.0);
    }

    #[test]
    fn monte_carlo_regret_is_close() {
        let g = ExplicitGame::<f64>::random(3, 2, 5).unwrap();
        let p = MixedProfile::new(vec![
            MixedStrategy::new(vec![0.5, 0.5]).unwrap(),
            MixedStrategy::new(vec![0.25, 0.75]).unwrap(),
            MixedStrategy::new(vec![1.0, 0.0]).unwrap(),
        ]);
        let exact = nash_regret(&g, &p, 0, Evaluator::Exact).unwrap();
        let mc = nash_regret(&g, &p, 0, Evaluator::MonteCarlo { samples: 200_000, seed: 1 }).unwrap();
        assert!((exact - mc).abs() < 0.02, "{exact} vs {mc}");
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = ExplicitGame::<f64>::matching_pennies();
        let p = MixedProfile::uniform(3, 2);
        assert!(nash_regret(&g, &p, 0, Evaluator::Exact).is_err());
        assert!(check_weak_nash(&g, &MixedProfile::uniform(2, 2), -1.0, 0.0, Evaluator::Exact).is_err());
    }
}
