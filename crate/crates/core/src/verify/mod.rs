//! Verification of approximate solution concepts.
//!
//! Every checker reports per-player regrets; nothing here computes equilibria.

mod correlated;
mod ir;
pub mod maximin;
mod nash;

pub use correlated::{ce_regret, ce_regrets, check_weak_ce, CeRegret};
pub use ir::{check_ir, ir_level, IrCheck, IrMethod};
pub use nash::{check_weak_nash, nash_regret, nash_regrets};

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Per-player regrets against a threshold `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RegretReport<T> {
    pub epsilon: T,
    pub per_player: Vec<T>,
    pub satisfied_fraction: f64,
    pub violators: Vec<usize>,
}

impl<T: Scalar> RegretReport<T> {
    /// A player is satisfied when its regret is at most `epsilon` plus the
    /// scalar's regret tolerance.
    pub fn new(per_player: Vec<T>, epsilon: T) -> Self {
        let threshold = epsilon + T::regret_tol();
        let violators: Vec<usize> = per_player
            .iter()
            .enumerate()
            .filter(|(_, r)| **r > threshold)
            .map(|(i, _)| i)
            .collect();
        let n = per_player.len();
        let satisfied_fraction = if n == 0 {
            1.0
        } else {
            (n - violators.len()) as f64 / n as f64
        };
        RegretReport {
            epsilon,
            per_player,
            satisfied_fraction,
            violators,
        }
    }

    pub fn max_regret(&self) -> T {
        self.per_player.iter().copied().fold(T::zero(), T::max)
    }

    /// True iff at least a `1 − delta` fraction of players is satisfied.
    pub fn weak_pass(&self, delta: f64) -> bool {
        self.satisfied_fraction >= 1.0 - delta - 1e-12
    }

    /// CSV with header `player,regret,satisfied`, one row per player.
    pub fn to_csv(&self) -> String {
        let threshold = self.epsilon + T::regret_tol();
        let mut out = String::from("player,regret,satisfied\n");
        for (i, r) in self.per_player.iter().enumerate() {
            out.push_str(&format!("{i},{r},{}\n", *r <= threshold));
        }
        out
    }
}

/// Clamps a computed regret at zero.
pub(crate) fn clamp_regret<T: Scalar>(r: T) -> T {
    if r > T::zero() {
        r
    } else {
        T::zero()
    }
}

pub(crate) fn check_threshold(epsilon: f64, delta: f64) -> crate::Result<()> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(crate::Error::Invalid(format!("epsilon {epsilon} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(crate::Error::Invalid(format!("delta {delta} must lie in [0, 1]")));
    }
    Ok(())
}
