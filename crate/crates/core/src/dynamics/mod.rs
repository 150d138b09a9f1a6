//! Regret-matching dynamics and the support-size audit.
//!
//! Each player keeps internal-regret accumulators
//! `R_i[j][k] = Σ_{t : a_i^t = j} (u_i(k, a_{-i}^t) − u_i(j, a_{-i}^t))`
//! and plays the stationary distribution of the Markov chain whose `j → k`
//! rate is `max(R_i[j][k], 0)`, or the uniform distribution when every
//! accumulated regret is non-positive. With two actions this is
//! `p(0) ∝ R⁺(1 → 0)`, `p(1) ∝ R⁺(0 → 1)`.

mod audit;

pub use audit::{support_lower_bound_audit, AuditReport, PrefixCertificate};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{CorrelatedDistribution, Game, PureProfile};
use crate::seed::derive_rng;
use crate::{Error, Result, Scalar};

/// A sequence of played profiles with the running internal regrets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PlayTrace<T> {
    pub seed: u64,
    pub rounds: Vec<PureProfile>,
    /// After round `t`, the largest per-player internal regret of the
    /// empirical distribution of rounds `1..=t`.
    pub max_internal_regret: Vec<T>,
    /// Final accumulators `R_i[j][k]`.
    pub accumulators: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> PlayTrace<T> {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Uniform distribution over the first `t` rounds.
    pub fn empirical(&self, t: usize) -> Result<CorrelatedDistribution<T>> {
        if t == 0 || t > self.rounds.len() {
            return Err(Error::Invalid(format!("prefix {t} outside 1..={}", self.rounds.len())));
        }
        CorrelatedDistribution::from_multiset(self.rounds[..t].iter().cloned())
    }
}

/// Internal regret `(1/t) Σ_j max_k max(R[j][k], 0)` of one player.
pub fn internal_regret_from_accumulator<T: Scalar>(acc: &[Vec<T>], t: usize) -> T {
    let total: T = acc
        .iter()
        .map(|row| row.iter().copied().fold(T::zero(), T::max))
        .sum();
    total / T::from_usize_lossy(t)
}

/// Stationary distribution of the chain with rates `max(R[j][k], 0)`.
pub fn regret_matching_strategy<T: Scalar>(acc: &[Vec<T>]) -> Vec<T> {
    let m = acc.len();
    let rate = |j: usize, k: usize| if j == k { T::zero() } else { acc[j][k].max(T::zero()) };
    let uniform = vec![T::one() / T::from_usize_lossy(m); m];
    if (0..m).all(|j| (0..m).all(|k| rate(j, k) == T::zero())) {
        return uniform;
    }
    if m == 2 {
        let (a, b) = (rate(1, 0), rate(0, 1));
        return vec![a / (a + b), b / (a + b)];
    }
    // Lazy chain P = I + (R⁺ − diag(out)) / μ, iterated from uniform and
    // averaged; every chain here is finite so the Cesàro mean converges.
    let out: Vec<T> = (0..m).map(|j| (0..m).map(|k| rate(j, k)).sum()).collect();
    let mu = out.iter().copied().fold(T::zero(), T::max) * T::lit(2.0);
    let mut p = uniform.clone();
    let mut avg = vec![T::zero(); m];
    let iters = 2000;
    for _ in 0..iters {
        let mut next: Vec<T> = (0..m).map(|k| p[k] * (T::one() - out[k] / mu)).collect();
        for j in 0..m {
            for k in 0..m {
                next[k] = next[k] + p[j] * rate(j, k) / mu;
            }
        }
        p = next;
        for k in 0..m {
            avg[k] = avg[k] + p[k];
        }
    }
    let s: T = avg.iter().copied().sum();
    avg.into_iter().map(|v| v / s).collect()
}

fn draw<T: Scalar>(probs: &[T], rng: &mut crate::seed::Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (a, p) in probs.iter().enumerate() {
        acc += p.as_f64();
        if u < acc {
            return a;
        }
    }
    probs.iter().rposition(|p| *p > T::zero()).unwrap_or(0)
}

/// Runs `rounds` rounds of regret matching.
pub fn run_regret_matching<T: Scalar, G: Game<T> + ?Sized>(game: &G, rounds: usize, seed: u64) -> PlayTrace<T> {
    let (n, m) = (game.num_players(), game.num_actions());
    let mut rng = derive_rng(seed, "regret-matching", 0);
    let mut acc = vec![vec![vec![T::zero(); m]; m]; n];
    let mut played = Vec::with_capacity(rounds);
    let mut max_regret = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let actions: Vec<usize> = acc
            .iter()
            .map(|a| draw(&regret_matching_strategy(a), &mut rng))
            .collect();
        let table = game.deviation_table(&actions);
        for (i, values) in table.iter().enumerate() {
            let j = actions[i];
            for k in 0..m {
                acc[i][j][k] = acc[i][j][k] + (values[k] - values[j]);
            }
        }
        max_regret.push(
            acc.iter()
                .map(|a| internal_regret_from_accumulator(a, t))
                .fold(T::zero(), T::max),
        );
        played.push(PureProfile(actions));
    }
    PlayTrace { seed, rounds: played, max_internal_regret: max_regret, accumulators: acc }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HittingTime {
    pub seed: u64,
    /// First `t` with every player's internal regret at most `ε`; `None`
    /// when censored at `t_max`.
    pub t_hit: Option<usize>,
    pub t_max: usize,
}

/// First prefix length at which a trace's empirical distribution is an
/// `ε`-correlated equilibrium.
pub fn hitting_time<T: Scalar>(trace: &PlayTrace<T>, epsilon: f64) -> Option<usize> {
    let threshold = T::lit(epsilon) + T::regret_tol();
    trace.max_internal_regret.iter().position(|&r| r <= threshold).map(|i| i + 1)
}

/// One trial per seed, in seed order.
pub fn convergence_time<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    epsilon: f64,
    t_max: usize,
    seeds: &[u64],
) -> Vec<HittingTime> {
    seeds
        .par_iter()
        .map(|&seed| HittingTime { seed, t_hit: hitting_time(&run_regret_matching(game, t_max, seed), epsilon), t_max })
        .collect()
}

pub fn hitting_times_to_csv(times: &[HittingTime]) -> String {
    let mut out = String::from("seed,t_hit,t_max\n");
    for h in times {
        let hit = h.t_hit.map_or_else(|| "censored".to_string(), |t| t.to_string());
        out.push_str(&format!("{},{hit},{}\n", h.seed, h.t_max));
    }
    out
}
