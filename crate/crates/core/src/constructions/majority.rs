//! Majority matching-pennies games over a 0/1 matrix.
//!
//! Row player `i` and column player `j` play matching pennies whenever
//! `M[i][j] = 1`; each player is paid the sign of the sum of its line rather
//! than the sum itself. Players `0..n` are rows, `n..n+m` are columns. Action
//! index 0 is the sign `+1` and index 1 is `−1`.
//!
//! Payoffs live on the `{−1, 0, 1}` scale internally; the [`Game`] impl
//! reports `(v + 1) / 2`, so every `[0, 1]`-scale regret is exactly half the
//! corresponding signed-scale regret.

use serde::{Deserialize, Serialize};

use crate::game::{signed_sum_dist, BinaryMatrix, Game, MixedProfile};
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityMpGame {
    matrix: BinaryMatrix,
    row_support: Vec<Vec<usize>>,
    col_support: Vec<Vec<usize>>,
}

/// Maps an action index to its sign.
#[inline]
pub fn action_sign(action: usize) -> i64 {
    if action == 0 {
        1
    } else {
        -1
    }
}

impl MajorityMpGame {
    pub fn new(matrix: BinaryMatrix) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(Error::Invalid("empty matrix".into()));
        }
        let row_support: Vec<Vec<usize>> = (0..matrix.rows()).map(|i| matrix.row_support(i)).collect();
        let col_support: Vec<Vec<usize>> = (0..matrix.cols()).map(|j| matrix.col_support(j)).collect();
        if row_support.iter().any(Vec::is_empty) || col_support.iter().any(Vec::is_empty) {
            return Err(Error::Invalid("matrix has an all-zero row or column".into()));
        }
        Ok(MajorityMpGame {
            matrix,
            row_support,
            col_support,
        })
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Opponents of `player` and whether `player` is a row player.
    fn neighbours(&self, player: usize) -> (bool, Vec<usize>) {
        let n = self.num_rows();
        if player < n {
            (true, self.row_support[player].iter().map(|&j| n + j).collect())
        } else {
            (false, self.col_support[player - n].clone())
        }
    }

    /// Signed payoff at a pure profile.
    pub fn signed_payoff(&self, player: usize, actions: &[usize]) -> i64 {
        let (is_row, nbrs) = self.neighbours(player);
        let own = action_sign(actions[player]);
        let sum: i64 = nbrs.iter().map(|&q| own * action_sign(actions[q])).sum();
        if is_row {
            sum.signum()
        } else {
            -sum.signum()
        }
    }

    /// Signed-scale `u(+1, x_{-i})` and `u(−1, x_{-i})`, via the exact law of
    /// the line sum.
    pub fn signed_deviation_values<T: Scalar>(
        &self,
        player: usize,
        profile: &MixedProfile<T>,
    ) -> Result<[T; 2]> {
        profile.validate(self.num_rows() + self.num_cols(), 2)?;
        let (is_row, nbrs) = self.neighbours(player);
        let mut out = [T::zero(); 2];
        for (action, slot) in out.iter_mut().enumerate() {
            // term own·a_q is +1 when a_q has the same sign as own action
            let probs: Vec<T> = nbrs
                .iter()
                .map(|&q| profile.strategy(q).prob(action))
                .collect();
            let e = signed_sum_dist(&probs)?.expected_sign();
            *slot = if is_row { e } else { -e };
        }
        Ok(out)
    }

    /// Signed-scale Nash regret of `player`.
    pub fn signed_regret<T: Scalar>(&self, player: usize, profile: &MixedProfile<T>) -> Result<T> {
        let v = self.signed_deviation_values(player, profile)?;
        let own = profile.strategy(player);
        let mixed = own.prob(0) * v[0] + own.prob(1) * v[1];
        let r = v[0].max(v[1]) - mixed;
        Ok(if r > T::zero() { r } else { T::zero() })
    }

    /// All players at `(½, ½)`: an exact equilibrium of every such game.
    pub fn declared_equilibrium<T: Scalar>(&self) -> MixedProfile<T> {
        MixedProfile::uniform(self.num_rows() + self.num_cols(), 2)
    }
}

fn rescale<T: Scalar>(v: T) -> T {
    (v + T::one()) / T::lit(2.0)
}

impl<T: Scalar> Game<T> for MajorityMpGame {
    fn num_players(&self) -> usize {
        self.num_rows() + self.num_cols()
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn family(&self) -> &'static str {
        "majority_mp"
    }

    fn payoff(&self, player: usize, actions: &[usize]) -> T {
        rescale(T::lit(self.signed_payoff(player, actions) as f64))
    }

    fn kernel_deviation_values(
        &self,
        player: usize,
        profile: &MixedProfile<T>,
    ) -> Option<Result<Vec<T>>> {
        Some(
            self.signed_deviation_values(player, profile)
                .map(|v| v.iter().map(|&x| rescale(x)).collect()),
        )
    }

    fn pure_deviation_values(&self, player: usize, actions: &[usize]) -> Vec<T> {
        let (is_row, nbrs) = self.neighbours(player);
        let sum: i64 = nbrs.iter().map(|&q| action_sign(actions[q])).sum();
        [1i64, -1]
            .iter()
            .map(|own| {
                let s = (own * sum).signum();
                rescale(T::lit(if is_row { s } else { -s } as f64))
            })
            .collect()
    }
}
