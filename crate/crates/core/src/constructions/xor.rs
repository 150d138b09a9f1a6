//! XOR individual-rationality game.
//!
//! Players are pairs `(s, p)` with a nonzero label `s ∈ {0,1}^κ` and a bit
//! string `p` of length `2^{κ−1}`. The label `s` splits `{0,1}^κ` into the
//! matched pairs `{x, x ⊕ s}`; bit `r` of `p` picks which end of the `r`-th
//! pair (pairs ordered by their smaller element) belongs to the player's
//! target set `V`. Every player has actions `{0, 1}`. The profile `a` is
//! mapped to `f(a) = ⊕_{j : a_j = 1} s_j` and player `(s, p)` earns 1 iff
//! `f(a) ∈ V`.
//!
//! A unilateral switch toggles `f(a)` across the player's own matching, so it
//! always flips the player's payoff; playing `(½, ½)` guarantees `½`. Any
//! distribution whose pushforward support has at most `2^κ / 4` points leaves
//! some player at `≤ ¼`.

use serde::{Deserialize, Serialize};

use crate::game::{
    xor_pushforward, CorrelatedDistribution, Game, IrSearch, MixedProfile,
};
use crate::{Error, Result, Scalar};

pub const MAX_KAPPA: u32 = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorIrGame {
    kappa: u32,
    /// Target set of every player, by index.
    targets: Vec<u64>,
}

/// A player that receives at most a quarter under some distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct XorCertificate<T> {
    pub player: usize,
    pub label: u32,
    pub bits: u64,
    /// Target set as a bit mask over `{0,1}^κ`.
    pub target_set: u64,
    /// Exact expected payoff under the distribution.
    pub payoff: T,
    pub support_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub enum ViolationSearch<T> {
    Found(XorCertificate<T>),
    /// Every player earns more than `¼`; carries the lowest-paid player.
    NotFound(XorCertificate<T>),
}

impl<T: Scalar> ViolationSearch<T> {
    pub fn certificate(&self) -> &XorCertificate<T> {
        match self {
            ViolationSearch::Found(c) | ViolationSearch::NotFound(c) => c,
        }
    }
}

impl XorIrGame {
    pub fn new(kappa: u32) -> Result<Self> {
        if !(1..=MAX_KAPPA).contains(&kappa) {
            return Err(Error::Invalid(format!("kappa {kappa} outside [1, {MAX_KAPPA}]")));
        }
        let mut game = XorIrGame { kappa, targets: Vec::new() };
        game.targets = (0..game.player_count())
            .map(|i| {
                let (s, p) = game.player(i);
                game.target_set(s, p)
            })
            .collect();
        Ok(game)
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// `2^κ`.
    pub fn points(&self) -> usize {
        1 << self.kappa
    }

    /// Length of `p`: `2^{κ−1}`.
    pub fn pair_count(&self) -> usize {
        1 << (self.kappa - 1)
    }

    /// `n = (2^κ − 1) · 2^{2^{κ−1}}`.
    pub fn player_count(&self) -> usize {
        (self.points() - 1) << self.pair_count()
    }

    /// `(s, p)` of a player index; labels run `1..2^κ` in blocks of `2^{2^{κ−1}}`.
    pub fn player(&self, index: usize) -> (u32, u64) {
        let block = 1usize << self.pair_count();
        ((index / block + 1) as u32, (index % block) as u64)
    }

    pub fn player_index(&self, label: u32, bits: u64) -> usize {
        (label as usize - 1) * (1usize << self.pair_count()) + bits as usize
    }

    pub fn label(&self, index: usize) -> u32 {
        self.player(index).0
    }

    /// Matched pairs `(x, x ⊕ s)` with `x < x ⊕ s`, in increasing order of `x`.
    pub fn pairs(&self, label: u32) -> Vec<(u32, u32)> {
        (0..self.points() as u32)
            .filter(|&x| x < x ^ label)
            .map(|x| (x, x ^ label))
            .collect()
    }

    /// Target set `V` of player `(s, p)` as a bit mask over `{0,1}^κ`.
    pub fn target_set(&self, label: u32, bits: u64) -> u64 {
        self.pairs(label)
            .into_iter()
            .enumerate()
            .fold(0u64, |acc, (r, (lo, hi))| {
                let member = if (bits >> r) & 1 == 1 { hi } else { lo };
                acc | (1u64 << member)
            })
    }

    pub fn player_target_set(&self, index: usize) -> u64 {
        self.targets[index]
    }

    /// `f(a)`: XOR of the labels of players playing 1.
    pub fn xor_image(&self, actions: &[usize]) -> u32 {
        actions
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == 1)
            .fold(0, |acc, (j, _)| acc ^ self.label(j))
    }

    /// Law of `f(a)` for `a ~ dist`.
    pub fn pushforward<T: Scalar>(&self, dist: &CorrelatedDistribution<T>) -> Vec<T> {
        let mut nu = vec![T::zero(); self.points()];
        for (a, w) in dist.support() {
            let x = self.xor_image(a) as usize;
            nu[x] = nu[x] + *w;
        }
        nu
    }

    /// Searches for the lowest-paid player under a pushforward law `nu`.
    ///
    /// For each nonzero label the target set takes, from every matched pair,
    /// the endpoint carrying less mass (ties go to the larger vector), which
    /// minimizes that label's payoff; the best label over all `2^κ − 1` is
    /// returned. Whenever `|supp(nu)| ≤ 2^κ / 4` the returned payoff is
    /// at most `¼`.
    pub fn find_violated_player_in<T: Scalar>(&self, nu: &[T]) -> Result<ViolationSearch<T>> {
        if nu.len() != self.points() {
            return Err(Error::Dimension(format!(
                "pushforward has {} entries, expected {}",
                nu.len(),
                self.points()
            )));
        }
        let support_size = nu.iter().filter(|&&v| v > T::zero()).count();
        let mut best: Option<(T, usize, XorCertificate<T>)> = None;
        for label in 1..self.points() as u32 {
            let mut bits = 0u64;
            let mut payoff = T::zero();
            let mut outside = 0usize;
            for (r, (lo, hi)) in self.pairs(label).into_iter().enumerate() {
                let (m_lo, m_hi) = (nu[lo as usize], nu[hi as usize]);
                if m_lo > T::zero() && m_hi == T::zero() || m_hi > T::zero() && m_lo == T::zero() {
                    outside += 1;
                }
                if m_lo < m_hi {
                    payoff = payoff + m_lo;
                } else {
                    bits |= 1 << r;
                    payoff = payoff + m_hi;
                }
            }
            let better = match &best {
                None => true,
                Some((p, o, _)) => payoff < *p || (payoff == *p && outside > *o),
            };
            if better {
                let cert = XorCertificate {
                    player: self.player_index(label, bits),
                    label,
                    bits,
                    target_set: self.target_set(label, bits),
                    payoff,
                    support_size,
                };
                best = Some((payoff, outside, cert));
            }
        }
        let (payoff, _, cert) = best.expect("kappa >= 1 has a nonzero label");
        Ok(if payoff <= T::lit(0.25) + T::regret_tol() {
            ViolationSearch::Found(cert)
        } else {
            ViolationSearch::NotFound(cert)
        })
    }

    /// Certificate search on a correlated distribution.
    pub fn find_violated_player<T: Scalar>(
        &self,
        dist: &CorrelatedDistribution<T>,
    ) -> Result<ViolationSearch<T>> {
        dist.validate(self.player_count(), 2)?;
        self.find_violated_player_in(&self.pushforward(dist))
    }

    fn mass_in<T: Scalar>(nu: &[T], set: u64) -> T {
        nu.iter()
            .enumerate()
            .filter(|(x, _)| (set >> x) & 1 == 1)
            .map(|(_, &v)| v)
            .sum()
    }
}

impl<T: Scalar> Game<T> for XorIrGame {
    fn num_players(&self) -> usize {
        self.player_count()
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn family(&self) -> &'static str {
        "xor"
    }

    fn payoff(&self, player: usize, actions: &[usize]) -> T {
        let x = self.xor_image(actions);
        if (self.player_target_set(player) >> x) & 1 == 1 {
            T::one()
        } else {
            T::zero()
        }
    }

    fn pure_deviation_values(&self, player: usize, actions: &[usize]) -> Vec<T> {
        let x = self.xor_image(actions);
        let s = self.label(player);
        let set = self.targets[player];
        let without = if actions[player] == 1 { x ^ s } else { x };
        [without, without ^ s]
            .iter()
            .map(|&y| if (set >> y) & 1 == 1 { T::one() } else { T::zero() })
            .collect()
    }

    fn deviation_table(&self, actions: &[usize]) -> Vec<Vec<T>> {
        let x = self.xor_image(actions);
        (0..self.player_count())
            .map(|i| {
                let s = self.label(i);
                let set = self.targets[i];
                let without = if actions[i] == 1 { x ^ s } else { x };
                [without, without ^ s]
                    .iter()
                    .map(|&y| if (set >> y) & 1 == 1 { T::one() } else { T::zero() })
                    .collect()
            })
            .collect()
    }

    fn kernel_deviation_values(
        &self,
        player: usize,
        profile: &MixedProfile<T>,
    ) -> Option<Result<Vec<T>>> {
        let run = || -> Result<Vec<T>> {
            profile.validate(self.player_count(), 2)?;
            let (q, labels): (Vec<T>, Vec<u32>) = (0..self.player_count())
                .filter(|&j| j != player)
                .map(|j| (profile.strategy(j).prob(1), self.label(j)))
                .unzip();
            let nu = xor_pushforward(&q, &labels, self.kappa)?;
            let (s, p) = self.player(player);
            let set = self.target_set(s, p);
            let shifted = (0..self.points() as u32)
                .filter(|&x| (set >> (x ^ s)) & 1 == 1)
                .fold(0u64, |acc, x| acc | (1u64 << x));
            Ok(vec![Self::mass_in(&nu, set), Self::mass_in(&nu, shifted)])
        };
        Some(run())
    }

    fn declared_ir_level(&self, _player: usize) -> Option<T> {
        Some(T::lit(0.5))
    }

    fn ir_violation_search(&self, dist: &CorrelatedDistribution<T>) -> Option<Result<IrSearch<T>>> {
        let half = T::lit(0.5);
        Some(self.find_violated_player(dist).map(|res| match res {
            ViolationSearch::Found(c) => IrSearch::Violation {
                player: c.player,
                payoff: c.payoff,
                ir_level: half,
            },
            ViolationSearch::NotFound(c) => IrSearch::NotFound {
                best_payoff: c.payoff,
                ir_level: half,
            },
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::PureProfile;

    #[test]
    fn player_counts() {
        assert_eq!(XorIrGame::new(1).unwrap().player_count(), 2);
        assert_eq!(XorIrGame::new(2).unwrap().player_count(), 12);
        assert_eq!(XorIrGame::new(3).unwrap().player_count(), 112);
        assert_eq!(XorIrGame::new(4).unwrap().player_count(), 3840);
        assert!(XorIrGame::new(0).is_err());
        assert!(XorIrGame::new(6).is_err());
    }

    #[test]
    fn target_sets_have_half_the_points() {
        for kappa in 1..=4 {
            let g = XorIrGame::new(kappa).unwrap();
            for i in 0..g.player_count() {
                assert_eq!(g.player_target_set(i).count_ones() as usize, g.pair_count());
                let (s, p) = g.player(i);
                assert_eq!(g.player_index(s, p), i);
            }
        }
    }

    #[test]
    fn point_mass_at_zero_profile_has_zero_payoff_certificate() {
        let g = XorIrGame::new(2).unwrap();
        let d = CorrelatedDistribution::<f64>::point_mass(PureProfile(vec![0; 12]));
        match g.find_violated_player(&d).unwrap() {
            ViolationSearch::Found(c) => {
                assert_eq!(c.payoff, 0.0);
                assert_eq!(Game::<f64>::payoff(&g, c.player, &vec![0; 12]), 0.0);
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn full_support_uniform_pushforward_has_no_violation() {
        let g = XorIrGame::new(2).unwrap();
        let nu = vec![0.25f64; 4];
        match g.find_violated_player_in(&nu).unwrap() {
            ViolationSearch::NotFound(c) => assert_eq!(c.payoff, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kernel_matches_pure_payoffs_at_point_masses() {
        let g = XorIrGame::new(2).unwrap();
        let actions: Vec<usize> = (0..12).map(|j| (j * 7 + 3) % 2).collect();
        let p = MixedProfile::<f64>::from_pure(&actions, 2);
        for i in 0..12 {
            let k = Game::<f64>::kernel_deviation_values(&g, i, &p).unwrap().unwrap();
            assert_eq!(k, Game::<f64>::pure_deviation_values(&g, i, &actions));
        }
    }
}
