use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{checked_profile_count, encode_profile, Game, ENUMERATION_LIMIT};
use crate::seed::derive_rng;
use crate::{Error, Result, Scalar};

/// A game given by its full payoff tensor.
///
/// `payoffs[i * m^n + index(a)]` is player `i`'s payoff at profile `a`, where
/// `index(a) = a_0 + a_1·m + a_2·m² + …` (player 0's action varies fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ExplicitGame<T> {
    n: usize,
    m: usize,
    payoffs: Vec<T>,
}

impl<T: Scalar> ExplicitGame<T> {
    pub fn new(n: usize, m: usize, payoffs: Vec<T>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Invalid("explicit game needs n, m >= 1".into()));
        }
        let profiles = checked_profile_count(m, n)
            .filter(|&c| c <= ENUMERATION_LIMIT)
            .ok_or(Error::guard("explicit tensor profiles", u128::MAX, ENUMERATION_LIMIT))?;
        let expected = profiles as usize * n;
        if payoffs.len() != expected {
            return Err(Error::Dimension(format!(
                "payoff tensor has {} entries, expected n·m^n = {expected}",
                payoffs.len()
            )));
        }
        if let Some(v) = payoffs
            .iter()
            .find(|v| !(v.is_finite() && **v >= T::zero() && **v <= T::one()))
        {
            return Err(Error::Invalid(format!("payoff {v} outside [0, 1]")));
        }
        Ok(ExplicitGame { n, m, payoffs })
    }

    /// Payoffs drawn i.i.d. uniform on `[0, 1)`.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        let profiles = checked_profile_count(m, n)
            .filter(|&c| c <= ENUMERATION_LIMIT)
            .ok_or(Error::guard("explicit tensor profiles", u128::MAX, ENUMERATION_LIMIT))?;
        let mut rng = derive_rng(seed, "random-explicit-game", 0);
        let payoffs = (0..profiles as usize * n)
            .map(|_| T::lit(rng.gen::<f64>()))
            .collect();
        Self::new(n, m, payoffs)
    }

    /// Two-player matching pennies on the `[0, 1]` scale: player 0 wins on a
    /// match, player 1 on a mismatch.
    pub fn matching_pennies() -> Self {
        let (o, z) = (T::one(), T::zero());
        // profiles (0,0), (1,0), (0,1), (1,1)
        ExplicitGame {
            n: 2,
            m: 2,
            payoffs: vec![o, z, z, o, z, o, o, z],
        }
    }

    pub fn constant(n: usize, m: usize, value: T) -> Result<Self> {
        let profiles = checked_profile_count(m, n)
            .filter(|&c| c <= ENUMERATION_LIMIT)
            .ok_or(Error::guard("explicit tensor profiles", u128::MAX, ENUMERATION_LIMIT))?;
        Self::new(n, m, vec![value; profiles as usize * n])
    }

    pub fn payoffs(&self) -> &[T] {
        &self.payoffs
    }

    fn stride(&self) -> usize {
        self.payoffs.len() / self.n
    }
}

impl<T: Scalar> Game<T> for ExplicitGame<T> {
    fn num_players(&self) -> usize {
        self.n
    }

    fn num_actions(&self) -> usize {
        self.m
    }

    fn family(&self) -> &'static str {
        "explicit"
    }

    fn payoff(&self, player: usize, actions: &[usize]) -> T {
        self.payoffs[player * self.stride() + encode_profile(actions, self.m) as usize]
    }
}
