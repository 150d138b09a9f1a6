//! Exhaustive search over k-uniform grids.
//!
//! Strategies are compositions of `k` into `m` parts in lexicographic order,
//! starting from `(0, …, 0, k)`. Profiles are indexed by an odometer over the
//! strategy list with player 0 varying fastest. Scans run in fixed-size waves
//! and report the lowest passing index, so results do not depend on the
//! number of worker threads.

mod cube;

pub use cube::{
    cube_search, observer_cube_search, CubeMode, CubeOutcome, CubeSpec, ObserverCertificate,
    ObserverCubeReport, VertexCertificate,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{Game, KUniformProfile, KUniformStrategy};
use crate::verify::{check_weak_nash, RegretReport};
use crate::{Error, Evaluator, Result, Scalar};

/// Profiles evaluated per parallel wave.
pub const WAVE: u128 = 4096;

/// `C(k + m − 1, m − 1)`, or `None` on overflow.
pub fn composition_count(k: u32, m: usize) -> Option<u128> {
    let r = m.checked_sub(1)? as u128;
    let top = k as u128 + r;
    let mut c: u128 = 1;
    for i in 0..r {
        c = c.checked_mul(top - i)? / (i + 1);
    }
    Some(c)
}

/// Lexicographic iterator over the compositions of `k` into `m` parts.
#[derive(Clone, Debug)]
pub struct Compositions {
    next: Option<Vec<u32>>,
}

impl Compositions {
    pub fn new(k: u32, m: usize) -> Self {
        let mut first = vec![0; m];
        if let Some(last) = first.last_mut() {
            *last = k;
        }
        Compositions { next: (m > 0).then_some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let m = current.len();
        let mut succ = current.clone();
        let mut suffix = 0u32;
        let mut pivot = None;
        for i in (0..m.saturating_sub(1)).rev() {
            suffix += succ[i + 1];
            if suffix > 0 {
                pivot = Some(i);
                break;
            }
        }
        if let Some(i) = pivot {
            succ[i] += 1;
            for c in &mut succ[i + 1..] {
                *c = 0;
            }
            succ[m - 1] = suffix - 1;
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Every k-uniform strategy over `m` actions, lexicographically.
pub fn enumerate_k_uniform(k: u32, m: usize) -> Result<impl Iterator<Item = KUniformStrategy>> {
    if k == 0 || m < 2 {
        return Err(Error::Invalid(format!("need k >= 1 and m >= 2, got k = {k}, m = {m}")));
    }
    composition_count(k, m).ok_or_else(|| Error::guard("k-uniform strategies", u128::MAX, u128::MAX))?;
    Ok(Compositions::new(k, m).map(move |c| KUniformStrategy::new(c, k).expect("composition sums to k")))
}

/// The profile grid of a game: `|strategies|^n` profiles.
#[derive(Clone, Debug)]
pub struct ProfileGrid {
    strategies: Vec<KUniformStrategy>,
    n: usize,
    total: u128,
}

impl ProfileGrid {
    pub fn new(n: usize, m: usize, k: u32) -> Result<Self> {
        let per = composition_count(k, m).ok_or_else(|| Error::guard("k-uniform strategies", u128::MAX, u128::MAX))?;
        let total = per
            .checked_pow(u32::try_from(n).map_err(|_| Error::Invalid("too many players".into()))?)
            .ok_or_else(|| Error::guard("grid profiles", u128::MAX, u128::MAX))?;
        if per > (1 << 24) {
            return Err(Error::guard("k-uniform strategies", per, 1 << 24));
        }
        Ok(ProfileGrid { strategies: enumerate_k_uniform(k, m)?.collect(), n, total })
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn strategies(&self) -> &[KUniformStrategy] {
        &self.strategies
    }

    /// Profile at an odometer index (player 0 fastest).
    pub fn profile(&self, mut index: u128) -> KUniformProfile {
        let base = self.strategies.len() as u128;
        KUniformProfile::new(
            (0..self.n)
                .map(|_| {
                    let s = self.strategies[(index % base) as usize].clone();
                    index /= base;
                    s
                })
                .collect(),
        )
    }
}

/// Lowest index in `[start, end)` satisfying `test`, scanning in waves.
pub(crate) fn first_in_waves<F>(start: u128, end: u128, test: F) -> Result<Option<u128>>
where
    F: Fn(u128) -> Result<bool> + Sync,
{
    let mut lo = start;
    while lo < end {
        let hi = end.min(lo + WAVE);
        let hits: Vec<Option<u128>> = (0..(hi - lo) as u64)
            .into_par_iter()
            .map(|off| {
                let idx = lo + off as u128;
                test(idx).map(|ok| ok.then_some(idx))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(idx) = hits.into_iter().flatten().next() {
            return Ok(Some(idx));
        }
        lo = hi;
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case", bound = "T: Scalar")]
pub enum GridSearchOutcome<T> {
    Found {
        profile: KUniformProfile,
        index: u128,
        scanned: u128,
        report: RegretReport<T>,
    },
    /// The whole grid was scanned without success.
    NotFound { scanned: u128 },
    /// The budget ran out before the grid was exhausted.
    NotFoundInBudget { scanned: u128, total: u128 },
}

fn passes<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    grid: &ProfileGrid,
    index: u128,
    epsilon: f64,
    delta: f64,
) -> Result<(bool, RegretReport<T>)> {
    check_weak_nash(game, &grid.profile(index).to_mixed::<T>(), epsilon, delta, Evaluator::Exact)
}

/// First grid profile, in odometer order, that is an (ε, δ)-weak Nash
/// equilibrium, scanning at most `budget` profiles.
pub fn exhaustive_weak_nash<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    k: u32,
    epsilon: f64,
    delta: f64,
    budget: u128,
) -> Result<GridSearchOutcome<T>> {
    let grid = ProfileGrid::new(game.num_players(), game.num_actions(), k)?;
    let end = grid.total().min(budget);
    let hit = first_in_waves(0, end, |i| passes(game, &grid, i, epsilon, delta).map(|r| r.0))?;
    Ok(match hit {
        Some(index) => {
            let (_, report) = passes(game, &grid, index, epsilon, delta)?;
            GridSearchOutcome::Found { profile: grid.profile(index), index, scanned: index + 1, report }
        }
        None if end == grid.total() => GridSearchOutcome::NotFound { scanned: end },
        None => GridSearchOutcome::NotFoundInBudget { scanned: end, total: grid.total() },
    })
}

/// Result of evaluating every grid profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridScanSummary {
    pub scanned: u128,
    pub passing: u128,
    pub first_passing: Option<u128>,
}

/// Evaluates every profile of the grid (guarded by `budget`).
pub fn scan_weak_nash<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    k: u32,
    epsilon: f64,
    delta: f64,
    budget: u128,
) -> Result<GridScanSummary> {
    let grid = ProfileGrid::new(game.num_players(), game.num_actions(), k)?;
    if grid.total() > budget {
        return Err(Error::guard("grid profiles", grid.total(), budget));
    }
    let flags = (0..grid.total() as u64)
        .into_par_iter()
        .map(|i| passes(game, &grid, i as u128, epsilon, delta).map(|r| r.0))
        .collect::<Result<Vec<bool>>>()?;
    Ok(GridScanSummary {
        scanned: flags.len() as u128,
        passing: flags.iter().filter(|&&f| f).count() as u128,
        first_passing: flags.iter().position(|&f| f).map(|i| i as u128),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ExplicitGame;

    #[test]
    fn compositions_in_order() {
        let all: Vec<Vec<u32>> = Compositions::new(3, 2).collect();
        assert_eq!(all, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert_eq!(Compositions::new(4, 3).count(), 15);
        assert_eq!(composition_count(4, 3), Some(15));
        let points: Vec<Vec<u32>> = Compositions::new(1, 4).collect();
        assert_eq!(points.len(), 4);
        assert!(points.iter().all(|c| c.iter().sum::<u32>() == 1));
        assert!(enumerate_k_uniform(0, 2).is_err());
    }

    #[test]
    fn matching_pennies_k2() {
        let g = ExplicitGame::<f64>::matching_pennies();
        match exhaustive_weak_nash(&g, 2, 0.5, 0.0, 1_000).unwrap() {
            GridSearchOutcome::Found { profile, scanned, .. } => {
                assert!(scanned <= 9);
                assert_eq!(profile.strategies().len(), 2);
            }
            other => panic!("{other:?}"),
        }
        let s = scan_weak_nash(&g, 2, 0.5, 0.0, 1_000).unwrap();
        assert_eq!(s.scanned, 9);
    }

    #[test]
    fn budget_and_exhaustion_are_distinct() {
        let g = ExplicitGame::<f64>::matching_pennies();
        assert!(matches!(
            exhaustive_weak_nash(&g, 1, 0.0, 0.0, 2).unwrap(),
            GridSearchOutcome::NotFoundInBudget { scanned: 2, total: 4 }
        ));
        assert!(matches!(
            exhaustive_weak_nash(&g, 1, 0.0, 0.0, 100).unwrap(),
            GridSearchOutcome::NotFound { scanned: 4 }
        ));
    }
}
