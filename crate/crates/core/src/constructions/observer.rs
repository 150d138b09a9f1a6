//! Matching-pennies players watched by subset observers.
//!
//! `2b` matching-pennies players form the pairs `(2p, 2p + 1)`: the even
//! player is paid 1 on a match, the odd player on a mismatch. Each observer
//! is a size-`b` subset `S ⊂ [2b]`. Action 0 pays the observer `½`; action 1
//! pays 1 iff the number of members of `S` playing action 1 lies in the window
//! `b/2 ± w·√b`.
//!
//! There are `C(2b, b)` observers, so they are addressed by subset and never
//! enumerated. [`ObserverSubgame`] instantiates the matching-pennies players
//! together with an explicit list of observers; since no player's payoff
//! depends on an observer's action, every regret computed in a subgame equals
//! the regret in the full game.
//!
//! Probabilities are always those of action 1.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::game::{count_distribution, Game, MixedProfile, MixedStrategy};
use crate::seed::Rng;
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObserverGame {
    b: usize,
    w: f64,
}

/// Which side of `½` a matching-pennies coordinate lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

impl ObserverGame {
    pub fn new(b: usize, w: f64) -> Result<Self> {
        if b == 0 || b % 2 == 1 {
            return Err(Error::Invalid(format!("b = {b} must be a positive even integer")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Invalid(format!("window width {w} must be positive")));
        }
        Ok(ObserverGame { b, w })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn num_mp_players(&self) -> usize {
        2 * self.b
    }

    /// `C(2b, b)`, or `None` when it exceeds `u128`.
    pub fn observer_count(&self) -> Option<u128> {
        let mut c: u128 = 1;
        for i in 0..self.b as u128 {
            c = c.checked_mul(2 * self.b as u128 - i)? / (i + 1);
        }
        Some(c)
    }

    /// Inclusive range of counts inside the window.
    pub fn window(&self) -> (usize, usize) {
        let half = self.b as f64 / 2.0;
        let r = self.w * (self.b as f64).sqrt();
        let lo = (half - r - 1e-9).ceil().max(0.0) as usize;
        let hi = ((half + r + 1e-9).floor() as usize).min(self.b);
        (lo, hi)
    }

    pub fn partner(&self, player: usize) -> usize {
        player ^ 1
    }

    pub fn validate_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.len() != self.b {
            return Err(Error::Invalid(format!(
                "observer subset has {} members, expected {}",
                subset.len(),
                self.b
            )));
        }
        if subset.windows(2).any(|w| w[0] >= w[1]) || subset.last().is_some_and(|&s| s >= 2 * self.b) {
            return Err(Error::Invalid("observer subset must be strictly increasing in [0, 2b)".into()));
        }
        Ok(())
    }

    /// Matching-pennies payoff at a pure profile of the `2b` players.
    pub fn mp_payoff<T: Scalar>(&self, player: usize, mp_actions: &[usize]) -> T {
        let matched = mp_actions[player] == mp_actions[self.partner(player)];
        if matched == (player % 2 == 0) {
            T::one()
        } else {
            T::zero()
        }
    }

    /// `u_i(0, x_partner)` and `u_i(1, x_partner)`.
    pub fn mp_deviation_values<T: Scalar>(&self, player: usize, mp_probs: &[T]) -> [T; 2] {
        let q = mp_probs[self.partner(player)];
        if player % 2 == 0 {
            [T::one() - q, q]
        } else {
            [q, T::one() - q]
        }
    }

    pub fn observer_payoff<T: Scalar>(&self, subset: &[usize], own: usize, mp_actions: &[usize]) -> T {
        if own == 0 {
            return T::lit(0.5);
        }
        let count = subset.iter().filter(|&&j| mp_actions[j] == 1).count();
        let (lo, hi) = self.window();
        if (lo..=hi).contains(&count) {
            T::one()
        } else {
            T::zero()
        }
    }

    /// Probability that the number of members of `subset` playing 1 lies in
    /// the window, by exact Poisson-binomial convolution.
    pub fn window_probability<T: Scalar>(&self, subset: &[usize], mp_probs: &[T]) -> Result<T> {
        self.validate_subset(subset)?;
        let probs: Vec<T> = subset.iter().map(|&j| mp_probs[j]).collect();
        let pmf = count_distribution(&probs)?;
        let (lo, hi) = self.window();
        Ok(pmf[lo..=hi].iter().copied().sum())
    }

    /// `[½, P(window)]`.
    pub fn observer_deviation_values<T: Scalar>(&self, subset: &[usize], mp_probs: &[T]) -> Result<[T; 2]> {
        Ok([T::lit(0.5), self.window_probability(subset, mp_probs)?])
    }

    /// Regret of an observer playing 1 with probability `y`.
    pub fn observer_regret<T: Scalar>(&self, subset: &[usize], mp_probs: &[T], y: T) -> Result<T> {
        let v = self.observer_deviation_values(subset, mp_probs)?;
        let mixed = (T::one() - y) * v[0] + y * v[1];
        let r = v[0].max(v[1]) - mixed;
        Ok(if r > T::zero() { r } else { T::zero() })
    }

    /// Minimum observer regret over `y ∈ [lo, hi]`; regret is linear in `y`
    /// so the minimum is attained at an endpoint.
    pub fn min_observer_regret<T: Scalar>(&self, subset: &[usize], mp_probs: &[T], lo: T, hi: T) -> Result<T> {
        Ok(self
            .observer_regret(subset, mp_probs, lo)?
            .min(self.observer_regret(subset, mp_probs, hi)?))
    }

    /// A size-`b` set of matching-pennies players on one side of `½`.
    ///
    /// Requires every coordinate off `½`; picks the larger side (ties go to
    /// `Below`) and returns its `b` smallest members. By pigeonhole one side
    /// always has at least `b` of the `2b` players.
    pub fn pigeonhole_subset<T: Scalar>(&self, mp_probs: &[T]) -> Result<(Vec<usize>, Side)> {
        if mp_probs.len() != 2 * self.b {
            return Err(Error::Dimension(format!(
                "{} matching-pennies coordinates, expected {}",
                mp_probs.len(),
                2 * self.b
            )));
        }
        let half = T::lit(0.5);
        if mp_probs.iter().any(|&p| (p - half).abs() <= T::input_tol()) {
            return Err(Error::NotApplicable("a matching-pennies coordinate sits at 1/2".into()));
        }
        let below: Vec<usize> = (0..2 * self.b).filter(|&j| mp_probs[j] < half).collect();
        let above: Vec<usize> = (0..2 * self.b).filter(|&j| mp_probs[j] > half).collect();
        let (mut set, side) = if below.len() >= above.len() {
            (below, Side::Below)
        } else {
            (above, Side::Above)
        };
        set.truncate(self.b);
        Ok((set, side))
    }

    /// Uniformly random observer.
    pub fn random_subset(&self, rng: &mut Rng) -> Vec<usize> {
        let mut s = sample(rng, 2 * self.b, self.b).into_vec();
        s.sort_unstable();
        s
    }

    pub fn subgame(&self, observers: Vec<Vec<usize>>) -> Result<ObserverSubgame> {
        for s in &observers {
            self.validate_subset(s)?;
        }
        Ok(ObserverSubgame {
            game: self.clone(),
            observers,
        })
    }
}

/// The matching-pennies players plus a chosen list of observers.
///
/// Players `0..2b` are matching-pennies players; player `2b + o` is observer
/// `observers[o]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObserverSubgame {
    game: ObserverGame,
    observers: Vec<Vec<usize>>,
}

impl ObserverSubgame {
    pub fn game(&self) -> &ObserverGame {
        &self.game
    }

    pub fn observers(&self) -> &[Vec<usize>] {
        &self.observers
    }

    /// Matching-pennies players at `(½, ½)`, observers on action 1.
    pub fn declared_equilibrium<T: Scalar>(&self) -> MixedProfile<T> {
        let mp = 2 * self.game.b;
        MixedProfile::new(
            (0..mp + self.observers.len())
                .map(|i| {
                    if i < mp {
                        MixedStrategy::uniform(2)
                    } else {
                        MixedStrategy::pure(2, 1)
                    }
                })
                .collect(),
        )
    }
}

impl<T: Scalar> Game<T> for ObserverSubgame {
    fn num_players(&self) -> usize {
        2 * self.game.b + self.observers.len()
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn family(&self) -> &'static str {
        "observer"
    }

    fn payoff(&self, player: usize, actions: &[usize]) -> T {
        let mp = 2 * self.game.b;
        if player < mp {
            self.game.mp_payoff(player, &actions[..mp])
        } else {
            self.game
                .observer_payoff(&self.observers[player - mp], actions[player], &actions[..mp])
        }
    }

    fn kernel_deviation_values(&self, player: usize, profile: &MixedProfile<T>) -> Option<Result<Vec<T>>> {
        let run = || -> Result<Vec<T>> {
            profile.validate(Game::<T>::num_players(self), 2)?;
            let mp = 2 * self.game.b;
            let probs: Vec<T> = (0..mp).map(|j| profile.strategy(j).prob(1)).collect();
            let v = if player < mp {
                self.game.mp_deviation_values(player, &probs)
            } else {
                self.game
                    .observer_deviation_values(&self.observers[player - mp], &probs)?
            };
            Ok(v.to_vec())
        };
        Some(run())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::expected_payoff_exact;
    use crate::seed::derive_rng;
    use crate::verify::nash_regret;
    use crate::Evaluator;

    fn binom_window(b: u64, lo: u64, hi: u64) -> f64 {
        let mut c = 1f64;
        let mut total = 0.0;
        for i in 0..=b {
            if i > 0 {
                c = c * (b - i + 1) as f64 / i as f64;
            }
            if (lo..=hi).contains(&i) {
                total += c;
            }
        }
        total / 2f64.powi(b as i32)
    }

    #[test]
    fn windows() {
        assert_eq!(ObserverGame::new(16, 1.0).unwrap().window(), (4, 12));
        assert_eq!(ObserverGame::new(144, 1.0).unwrap().window(), (60, 84));
        assert_eq!(ObserverGame::new(4, 1.0).unwrap().window(), (0, 4));
        assert_eq!(ObserverGame::new(16, 2.0).unwrap().window(), (0, 16));
        assert!(ObserverGame::new(5, 1.0).is_err());
    }

    #[test]
    fn fair_window_probability_b16() {
        let g = ObserverGame::new(16, 1.0).unwrap();
        let s: Vec<usize> = (0..16).collect();
        let p = g.window_probability(&s, &[0.5f64; 32]).unwrap();
        assert!((p - binom_window(16, 4, 12)).abs() < 1e-12);
        assert!(p > 0.94);
    }

    #[test]
    fn point_mass_members() {
        let g = ObserverGame::new(4, 1.0).unwrap();
        let s = vec![0, 2, 5, 7];
        assert_eq!(g.window_probability(&s, &[1.0f64; 8]).unwrap(), 1.0);
    }

    #[test]
    fn observer_count_small() {
        assert_eq!(ObserverGame::new(2, 1.0).unwrap().observer_count(), Some(6));
        assert_eq!(ObserverGame::new(8, 1.0).unwrap().observer_count(), Some(12870));
    }

    #[test]
    fn pigeonhole_picks_larger_side() {
        let g = ObserverGame::new(2, 1.0).unwrap();
        let (s, side) = g.pigeonhole_subset(&[0.75f64, 0.25, 0.75, 0.75]).unwrap();
        assert_eq!(side, Side::Above);
        assert_eq!(s, vec![0, 2]);
        let (s, side) = g.pigeonhole_subset(&[0.75f64, 0.25, 0.25, 0.75]).unwrap();
        assert_eq!(side, Side::Below);
        assert_eq!(s, vec![1, 2]);
        assert!(g.pigeonhole_subset(&[0.5f64, 0.25, 0.25, 0.75]).is_err());
    }

    #[test]
    fn declared_equilibrium_has_zero_regret() {
        let g = ObserverGame::new(16, 1.0).unwrap();
        let mut rng = derive_rng(1, "test", 0);
        let obs = (0..5).map(|_| g.random_subset(&mut rng)).collect();
        let sub = g.subgame(obs).unwrap();
        let p = sub.declared_equilibrium::<f64>();
        for i in 0..Game::<f64>::num_players(&sub) {
            assert!(nash_regret(&sub, &p, i, Evaluator::Exact).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn kernel_matches_enumeration_b2() {
        let g = ObserverGame::new(2, 0.5).unwrap();
        assert_eq!(g.window(), (1, 1));
        let sub = g.subgame(vec![vec![0, 1], vec![1, 3]]).unwrap();
        let p = MixedProfile::binary(&[0.3f64, 0.6, 0.8, 0.1, 0.5, 0.9]).unwrap();
        for i in 0..6 {
            let k = crate::game::expected_payoff(&sub, &p, i).unwrap();
            let e = expected_payoff_exact(&sub, &p, i).unwrap();
            assert!((k - e).abs() < 1e-12);
        }
    }
}
