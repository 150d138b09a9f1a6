use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maximin::maximin;
use crate::game::{advance, correlated_payoff, CorrelatedDistribution, Game, IrSearch};
use crate::{Error, Result, Scalar};

/// Largest opponent-profile count the exact IR computation will enumerate.
pub const IR_ENUMERATION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IrMethod {
    /// Maximin over enumerated opponent pure profiles.
    Exact,
    /// Value declared by the game family.
    Analytic,
}

/// Individually rational level `v_i = max_{x_i} min_{a_{-i}} u_i(x_i, a_{-i})`.
pub fn ir_level<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    player: usize,
    method: IrMethod,
) -> Result<T> {
    let (n, m) = (game.num_players(), game.num_actions());
    if player >= n {
        return Err(Error::Dimension(format!("player {player} out of range for {n} players")));
    }
    match method {
        IrMethod::Analytic => game.declared_ir_level(player).ok_or_else(|| {
            Error::NotApplicable(format!("{} declares no IR level", game.family()))
        }),
        IrMethod::Exact => {
            let opponents = (m as u128)
                .checked_pow((n - 1) as u32)
                .filter(|&c| c <= IR_ENUMERATION_LIMIT)
                .ok_or_else(|| Error::guard("opponent profiles", u128::MAX, IR_ENUMERATION_LIMIT))?;
            let mut outcomes = Vec::with_capacity(opponents as usize);
            let mut actions = vec![0usize; n];
            loop {
                if actions[player] == 0 {
                    outcomes.push(game.pure_deviation_values(player, &actions));
                }
                if !advance(&mut actions, m) {
                    break;
                }
            }
            Ok(maximin(&outcomes)?.value)
        }
    }
}

/// Result of an ε-individual-rationality check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IrCheck<T> {
    pub passed: bool,
    pub worst_player: usize,
    /// `min_i (u_i(dist) − v_i)`.
    pub worst_gap: T,
    /// True when the worst player came from a family certificate search
    /// rather than a scan over every player.
    pub certified_by_search: bool,
}

/// `dist` is ε-IR iff `u_i(dist) ≥ v_i − ε` for every player.
pub fn check_ir<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    dist: &CorrelatedDistribution<T>,
    epsilon: f64,
    method: IrMethod,
) -> Result<IrCheck<T>> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::Invalid(format!("epsilon {epsilon} must be >= 0")));
    }
    dist.validate(game.num_players(), game.num_actions())?;
    let eps = T::lit(epsilon);
    if let Some(search) = game.ir_violation_search(dist) {
        let (player, gap) = match search? {
            IrSearch::Violation {
                player,
                payoff,
                ir_level,
            } => (player, payoff - ir_level),
            IrSearch::NotFound {
                best_payoff,
                ir_level,
            } => (usize::MAX, best_payoff - ir_level),
        };
        return Ok(IrCheck {
            passed: gap >= -eps - T::regret_tol(),
            worst_player: player,
            worst_gap: gap,
            certified_by_search: true,
        });
    }
    let gaps: Vec<T> = (0..game.num_players())
        .into_par_iter()
        .map(|i| Ok(correlated_payoff(game, dist, i) - ir_level(game, i, method)?))
        .collect::<Result<_>>()?;
    let (worst_player, worst_gap) = gaps
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::infinity()), |best, (i, g)| if g < best.1 { (i, g) } else { best });
    Ok(IrCheck {
        passed: worst_gap >= -eps - T::regret_tol(),
        worst_player,
        worst_gap,
        certified_by_search: false,
    })
}
