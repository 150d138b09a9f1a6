use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_threshold, clamp_regret, RegretReport};
use crate::game::{CorrelatedDistribution, Game};
use crate::{Error, Result, Scalar};

/// Correlated-equilibrium regrets of one player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CeRegret<T> {
    /// Best gain over all switching functions `f: [m] → [m]`.
    pub internal: T,
    /// Best gain over constant switching functions (coarse deviations).
    pub external: T,
    /// A maximizing switching function; fixed points where no switch gains.
    pub worst_switch: Vec<usize>,
}

/// Folds per-recommendation gain sums `gains[r][a]` into a regret triple.
///
/// The best switching function decomposes over recommended actions, so
/// `internal = Σ_r max(0, max_a gains[r][a])`.
pub(crate) fn regret_from_gains<T: Scalar>(gains: &[Vec<T>]) -> CeRegret<T> {
    let m = gains.len();
    let mut internal = T::zero();
    let mut worst_switch = Vec::with_capacity(m);
    for (r, row) in gains.iter().enumerate() {
        let mut best = (r, T::zero());
        for (a, &g) in row.iter().enumerate() {
            if g > best.1 {
                best = (a, g);
            }
        }
        internal = internal + best.1;
        worst_switch.push(best.0);
    }
    let external = (0..m)
        .map(|a| gains.iter().map(|row| row[a]).sum::<T>())
        .fold(T::zero(), T::max);
    CeRegret {
        internal: clamp_regret(internal),
        external: clamp_regret(external),
        worst_switch,
    }
}

fn check_support<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    dist: &CorrelatedDistribution<T>,
) -> Result<()> {
    if dist.support().is_empty() {
        return Err(Error::Invalid("empty support".into()));
    }
    dist.validate(game.num_players(), game.num_actions())
}

/// Internal and external regret of `player` under `dist`.
pub fn ce_regret<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    dist: &CorrelatedDistribution<T>,
    player: usize,
) -> Result<CeRegret<T>> {
    check_support(game, dist)?;
    let m = game.num_actions();
    let mut gains = vec![vec![T::zero(); m]; m];
    for (a, w) in dist.support() {
        let values = game.pure_deviation_values(player, a);
        let r = a[player];
        for (alt, v) in values.iter().enumerate() {
            gains[r][alt] = gains[r][alt] + *w * (*v - values[r]);
        }
    }
    Ok(regret_from_gains(&gains))
}

/// `ce_regret` for every player, sharing one deviation table per support point.
pub fn ce_regrets<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    dist: &CorrelatedDistribution<T>,
) -> Result<Vec<CeRegret<T>>> {
    check_support(game, dist)?;
    let (n, m) = (game.num_players(), game.num_actions());
    let tables: Vec<Vec<Vec<T>>> = dist
        .support()
        .par_iter()
        .map(|(a, _)| game.deviation_table(a))
        .collect();
    let mut gains = vec![vec![vec![T::zero(); m]; m]; n];
    for ((a, w), table) in dist.support().iter().zip(&tables) {
        for (i, values) in table.iter().enumerate() {
            let r = a[i];
            for (alt, v) in values.iter().enumerate() {
                gains[i][r][alt] = gains[i][r][alt] + *w * (*v - values[r]);
            }
        }
    }
    Ok(gains.iter().map(|g| regret_from_gains(g)).collect())
}

/// `(ε, δ)`-weak approximate correlated equilibrium test on internal regret.
pub fn check_weak_ce<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    dist: &CorrelatedDistribution<T>,
    epsilon: f64,
    delta: f64,
) -> Result<(bool, RegretReport<T>)> {
    check_threshold(epsilon, delta)?;
    let regrets = ce_regrets(game, dist)?;
    let report = RegretReport::new(regrets.into_iter().map(|r| r.internal).collect(), T::lit(epsilon));
    Ok((report.weak_pass(delta), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ExplicitGame, PureProfile};

    fn coordination() -> ExplicitGame<f64> {
        // both players get 1 on a match
        ExplicitGame::new(2, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn pure_nash_point_mass_has_zero_internal_regret() {
        let d = CorrelatedDistribution::point_mass(PureProfile(vec![1, 1]));
        for i in 0..2 {
            let r = ce_regret(&coordination(), &d, i).unwrap();
            assert_eq!(r.internal, 0.0);
            assert_eq!(r.worst_switch, vec![0, 1]);
        }
    }

    #[test]
    fn matching_pennies_correlated_on_diagonal() {
        let g = ExplicitGame::<f64>::matching_pennies();
        let d = CorrelatedDistribution::new(vec![
            (PureProfile(vec![0, 0]), 0.5),
            (PureProfile(vec![1, 1]), 0.5),
        ])
        .unwrap();
        let col = ce_regret(&g, &d, 1).unwrap();
        // flipping every recommendation wins always: gain 1 on the [0, 1] scale
        assert_eq!(col.internal, 1.0);
        assert_eq!(col.worst_switch, vec![1, 0]);
        // a constant deviation wins on exactly one of the two recommendations
        assert_eq!(col.external, 0.5);
        assert_eq!(ce_regret(&g, &d, 0).unwrap().internal, 0.0);
        let all = ce_regrets(&g, &d).unwrap();
        assert_eq!(all[1], col);
    }

    #[test]
    fn empty_support_is_rejected() {
        let g = ExplicitGame::<f64>::matching_pennies();
        let d = CorrelatedDistribution::<f64>::from_multiset(Vec::new());
        assert!(d.is_err());
        let _ = g;
    }
}
