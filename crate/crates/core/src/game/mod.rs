//! Game representations, strategy types and expected-payoff evaluation.

mod explicit;
pub mod io;
pub mod kernels;
mod matrix;
mod strategy;

pub use explicit::ExplicitGame;
pub use kernels::{count_distribution, signed_sum_dist, xor_pushforward, SignedSumDistribution};
pub use matrix::BinaryMatrix;
pub use strategy::{
    CorrelatedDistribution, KUniformProfile, KUniformStrategy, MixedProfile, MixedStrategy,
    PureProfile,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed::{derive_rng, derive_seed};
use crate::{Error, Result, Scalar};

/// Largest number of pure profiles any exact enumeration path will visit.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// An `n`-player, `m`-action normal-form game with payoffs in `[0, 1]`.
///
/// Families with succinct structure override the kernel hooks so that
/// expected payoffs never require enumerating `m^n` profiles.
pub trait Game<T: Scalar>: Send + Sync {
    fn num_players(&self) -> usize;

    fn num_actions(&self) -> usize;

    fn payoff(&self, player: usize, actions: &[usize]) -> T;

    /// Short family name used in reports.
    fn family(&self) -> &'static str {
        "game"
    }

    /// Closed-form `u_i(a, x_{-i})` for every own action `a`, when available.
    fn kernel_deviation_values(
        &self,
        _player: usize,
        _profile: &MixedProfile<T>,
    ) -> Option<Result<Vec<T>>> {
        None
    }

    /// `u_i(a, a_{-i})` for every own action `a` at a pure profile.
    fn pure_deviation_values(&self, player: usize, actions: &[usize]) -> Vec<T> {
        let mut scratch = actions.to_vec();
        (0..self.num_actions())
            .map(|a| {
                scratch[player] = a;
                self.payoff(player, &scratch)
            })
            .collect()
    }

    /// `pure_deviation_values` for every player at once.
    fn deviation_table(&self, actions: &[usize]) -> Vec<Vec<T>> {
        (0..self.num_players())
            .map(|i| self.pure_deviation_values(i, actions))
            .collect()
    }

    /// Individually rational level declared analytically by the family.
    fn declared_ir_level(&self, _player: usize) -> Option<T> {
        None
    }

    /// Family-specific search for a player whose payoff under `dist` falls
    /// below its IR level, replacing a scan over all players.
    fn ir_violation_search(
        &self,
        _dist: &CorrelatedDistribution<T>,
    ) -> Option<Result<IrSearch<T>>> {
        None
    }
}

/// Outcome of a family-specific IR violation search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub enum IrSearch<T> {
    Violation {
        player: usize,
        payoff: T,
        ir_level: T,
    },
    NotFound {
        best_payoff: T,
        ir_level: T,
    },
}

/// How expected payoffs against mixed opponents are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Evaluator {
    /// Family kernel when present, otherwise guarded enumeration.
    #[default]
    Exact,
    /// Independent Monte-Carlo estimate per own action.
    MonteCarlo { samples: usize, seed: u64 },
}

pub(crate) fn checked_profile_count(m: usize, n: usize) -> Option<u128> {
    (m as u128).checked_pow(n.try_into().ok()?)
}

fn enumeration_guard(m: usize, n: usize) -> Result<u128> {
    match checked_profile_count(m, n) {
        Some(c) if c <= ENUMERATION_LIMIT => Ok(c),
        Some(c) => Err(Error::guard("pure profiles", c, ENUMERATION_LIMIT)),
        None => Err(Error::guard("pure profiles", u128::MAX, ENUMERATION_LIMIT)),
    }
}

/// Mixed-radix odometer over `[m]^n`, position 0 varying fastest.
pub fn advance(actions: &mut [usize], m: usize) -> bool {
    for a in actions.iter_mut() {
        *a += 1;
        if *a < m {
            return true;
        }
        *a = 0;
    }
    false
}

/// Decodes a profile index (player 0 least significant).
pub fn decode_profile(mut index: u128, n: usize, m: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((index % m as u128) as usize);
        index /= m as u128;
    }
    out
}

pub fn encode_profile(actions: &[usize], m: usize) -> u128 {
    actions
        .iter()
        .rev()
        .fold(0u128, |acc, &a| acc * m as u128 + a as u128)
}

/// `u_i(a, x_{-i})` for each own action by enumerating opponents' profiles.
pub fn enumerate_deviation_values<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    player: usize,
) -> Result<Vec<T>> {
    let (n, m) = (game.num_players(), game.num_actions());
    profile.validate(n, m)?;
    enumeration_guard(m, n)?;
    let mut values = vec![T::zero(); m];
    let mut actions = vec![0usize; n];
    loop {
        if actions[player] == 0 {
            let weight = actions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != player)
                .fold(T::one(), |w, (j, &a)| w * profile.strategy(j).prob(a));
            if weight > T::zero() {
                for (a, v) in values.iter_mut().enumerate() {
                    actions[player] = a;
                    *v = *v + weight * game.payoff(player, &actions);
                }
                actions[player] = 0;
            }
        }
        if !advance(&mut actions, m) {
            break;
        }
    }
    Ok(values)
}

/// `u_i(a, x_{-i})` for every own action `a`, using the requested evaluator.
pub fn deviation_values<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    player: usize,
    evaluator: Evaluator,
) -> Result<Vec<T>> {
    let (n, m) = (game.num_players(), game.num_actions());
    if player >= n {
        return Err(Error::Dimension(format!("player {player} out of range for {n} players")));
    }
    profile.validate(n, m)?;
    match evaluator {
        Evaluator::Exact => match game.kernel_deviation_values(player, profile) {
            Some(values) => values,
            None => enumerate_deviation_values(game, profile, player),
        },
        Evaluator::MonteCarlo { samples, seed } => (0..m)
            .map(|a| {
                let fixed = profile.with_strategy(player, MixedStrategy::pure(m, a));
                expected_payoff_mc(game, &fixed, player, samples, derive_seed(seed, "deviation-mc", a as u64))
                    .map(|(est, _)| est)
            })
            .collect(),
    }
}

/// `u_i(x)` through the kernel (or enumeration) path.
pub fn expected_payoff<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    player: usize,
) -> Result<T> {
    let values = deviation_values(game, profile, player, Evaluator::Exact)?;
    Ok(mix(profile.strategy(player), &values))
}

pub(crate) fn mix<T: Scalar>(strategy: &MixedStrategy<T>, values: &[T]) -> T {
    strategy
        .probs()
        .iter()
        .zip(values)
        .map(|(&p, &v)| p * v)
        .sum()
}

/// `u_i(x)` as the sum over all `m^n` pure profiles of probability times payoff.
pub fn expected_payoff_exact<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    player: usize,
) -> Result<T> {
    let (n, m) = (game.num_players(), game.num_actions());
    profile.validate(n, m)?;
    if player >= n {
        return Err(Error::Dimension(format!("player {player} out of range for {n} players")));
    }
    enumeration_guard(m, n)?;
    let mut total = T::zero();
    let mut actions = vec![0usize; n];
    loop {
        let weight = actions
            .iter()
            .enumerate()
            .fold(T::one(), |w, (j, &a)| w * profile.strategy(j).prob(a));
        if weight > T::zero() {
            total = total + weight * game.payoff(player, &actions);
        }
        if !advance(&mut actions, m) {
            break;
        }
    }
    Ok(total)
}

/// Hoeffding half-width at 99% confidence for `samples` draws in `[0, 1]`.
pub fn hoeffding_halfwidth(samples: usize) -> f64 {
    ((200f64).ln() / (2.0 * samples as f64)).sqrt()
}

/// Monte-Carlo estimate of `u_i(x)` with its 99% Hoeffding half-width.
pub fn expected_payoff_mc<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    profile: &MixedProfile<T>,
    player: usize,
    samples: usize,
    seed: u64,
) -> Result<(T, T)> {
    let (n, m) = (game.num_players(), game.num_actions());
    profile.validate(n, m)?;
    if samples == 0 {
        return Err(Error::Invalid("samples must be at least 1".into()));
    }
    let mut rng = derive_rng(seed, "expected-payoff-mc", player as u64);
    let mut sum = 0.0f64;
    let mut actions = vec![0usize; n];
    for _ in 0..samples {
        for (a, s) in actions.iter_mut().zip(profile.strategies()) {
            *a = s.sample(&mut rng);
        }
        sum += game.payoff(player, &actions).as_f64();
    }
    Ok((
        T::lit(sum / samples as f64),
        T::lit(hoeffding_halfwidth(samples)),
    ))
}

/// `E_{a ~ dist}[u_i(a)]`.
pub fn correlated_payoff<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    dist: &CorrelatedDistribution<T>,
    player: usize,
) -> T {
    dist.support()
        .iter()
        .map(|(a, w)| *w * game.payoff(player, a))
        .sum()
}

/// Materializes any game as an explicit payoff tensor (guarded).
pub fn to_explicit<T: Scalar, G: Game<T> + ?Sized>(game: &G) -> Result<ExplicitGame<T>> {
    let (n, m) = (game.num_players(), game.num_actions());
    let count = enumeration_guard(m, n)?;
    let entries = count * n as u128;
    if entries > ENUMERATION_LIMIT {
        return Err(Error::guard("explicit tensor entries", entries, ENUMERATION_LIMIT));
    }
    let per_player: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut actions = vec![0usize; n];
            let mut out = Vec::with_capacity(count as usize);
            loop {
                out.push(game.payoff(i, &actions));
                if !advance(&mut actions, m) {
                    break;
                }
            }
            out
        })
        .collect();
    ExplicitGame::new(n, m, per_player.concat())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_codec_round_trip() {
        for idx in 0..27u128 {
            let p = decode_profile(idx, 3, 3);
            assert_eq!(encode_profile(&p, 3), idx);
        }
        assert_eq!(decode_profile(1, 3, 2), vec![1, 0, 0]);
    }

    #[test]
    fn odometer_visits_every_profile_once() {
        let mut a = vec![0usize; 3];
        let mut seen = std::collections::HashSet::new();
        loop {
            assert!(seen.insert(a.clone()));
            if !advance(&mut a, 3) {
                break;
            }
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn hoeffding_formula() {
        assert!((hoeffding_halfwidth(100) - ((200f64).ln() / 200.0).sqrt()).abs() < 1e-15);
    }
}
