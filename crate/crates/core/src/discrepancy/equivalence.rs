//! Colorings versus two-point grid profiles of majority matching-pennies
//! games.
//!
//! On the grid `{(k − 1)/2k, (k + 1)/2k}` a player's probability of `+1`
//! encodes a sign. Forward: low-discrepancy colorings of `M` and `Mᵀ` give a
//! profile where every player's ±1-scale regret is at most `0.4`. Reverse:
//! every such `0.4`-Nash grid profile yields a column coloring with
//! `‖Mχ‖_∞ ≤ k √(α t)`. Regrets here are on the ±1 payoff scale.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{disc_exact, Coloring};
use crate::constructions::{balance_ratio, MajorityMpGame};
use crate::game::{BinaryMatrix, KUniformStrategy, MixedProfile, MixedStrategy};
use crate::seed::derive_rng;
use crate::{Error, Result, Scalar};

/// ±1-scale regret threshold of the correspondence.
pub const NASH_THRESHOLD: f64 = 0.4;
/// Largest `n + m` scanned exhaustively in the reverse direction.
pub const REVERSE_EXHAUSTIVE_PLAYERS: usize = 16;
pub const DEFAULT_REVERSE_SAMPLES: u64 = 100_000;
const KEPT_EXAMPLES: usize = 10;

fn check_k(k: u32) -> Result<()> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::Invalid(format!("k = {k} must be odd and at least 3")));
    }
    Ok(())
}

fn grid_strategy<T: Scalar>(sign: i8, k: u32) -> MixedStrategy<T> {
    let plus = (k as i64 + sign as i64) as u32;
    KUniformStrategy::new(vec![plus, 2 * k - plus], 2 * k)
        .expect("two-point grid strategy")
        .to_mixed()
}

/// Rows first, then columns; row `i` plays `+1` with probability
/// `(k + χ'_i) / 2k`, column `j` with `(k + χ_j) / 2k`.
pub fn coloring_to_profile<T: Scalar>(cols: &[i8], rows: &[i8], k: u32) -> Result<MixedProfile<T>> {
    check_k(k)?;
    Coloring::new(cols.to_vec(), Some(rows.to_vec()))?;
    Ok(MixedProfile::new(
        rows.iter().chain(cols).map(|&s| grid_strategy(s, k)).collect(),
    ))
}

/// Inverse of [`coloring_to_profile`] for a game with `num_rows` rows.
pub fn profile_to_coloring<T: Scalar>(profile: &MixedProfile<T>, num_rows: usize, k: u32) -> Result<Coloring> {
    check_k(k)?;
    if num_rows > profile.len() {
        return Err(Error::Dimension(format!("{num_rows} rows but {} players", profile.len())));
    }
    let two_k = 2.0 * k as f64;
    let (hi, lo) = ((k as f64 + 1.0) / two_k, (k as f64 - 1.0) / two_k);
    let signs = profile
        .strategies()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.num_actions() != 2 {
                return Err(Error::Dimension(format!("player {i} is not binary")));
            }
            let p = s.prob(0).as_f64();
            if (p - hi).abs() <= 1e-12 {
                Ok(1)
            } else if (p - lo).abs() <= 1e-12 {
                Ok(-1)
            } else {
                Err(Error::Invalid(format!("player {i} at {p} is off the two-point grid for k = {k}")))
            }
        })
        .collect::<Result<Vec<i8>>>()?;
    Coloring::new(signs[num_rows..].to_vec(), Some(signs[..num_rows].to_vec()))
}

/// Smallest odd integer that is at least `max(3, 3 α C)`.
pub fn forward_k(alpha: f64, c: f64) -> u32 {
    let raw = (3.0 * alpha * c - 1e-9).ceil().max(3.0) as u32;
    if raw % 2 == 0 {
        raw + 1
    } else {
        raw
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardReport {
    pub alpha: f64,
    pub t: usize,
    pub disc_rows: i64,
    pub disc_cols: i64,
    /// `max(disc(M), disc(Mᵀ)) / √t`.
    pub c: f64,
    pub k: u32,
    pub coloring: Coloring,
    /// ±1-scale regret of every player, rows first.
    pub regrets: Vec<f64>,
    pub max_regret: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReverseReport {
    pub alpha: f64,
    pub t: usize,
    pub k: u32,
    /// `k √(α t)`.
    pub bound: f64,
    pub exhaustive: bool,
    pub scanned: u64,
    /// Grid profiles found with every regret at most the threshold.
    pub equilibria: u64,
    pub max_row_sum: Option<i64>,
    pub violations: u64,
    pub examples: Vec<Coloring>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "lowercase")]
pub enum EquivalenceReport {
    Forward(ForwardReport),
    Reverse(ReverseReport),
}

fn max_signed_regret(game: &MajorityMpGame, profile: &MixedProfile<f64>) -> Result<(Vec<f64>, f64)> {
    let n = game.num_rows() + game.num_cols();
    let regrets = (0..n)
        .map(|i| game.signed_regret(i, profile))
        .collect::<Result<Vec<f64>>>()?;
    let max = regrets.iter().copied().fold(0.0, f64::max);
    Ok((regrets, max))
}

struct Setup {
    alpha: f64,
    t: usize,
}

fn setup(matrix: &BinaryMatrix, alpha: Option<f64>) -> Result<Setup> {
    let measured = balance_ratio(matrix)?;
    let alpha = match alpha {
        Some(a) if measured > a + 1e-12 => {
            return Err(Error::Invalid(format!("matrix is {measured}-balanced, not {a}-balanced")));
        }
        Some(a) => a,
        None => measured,
    };
    Ok(Setup { alpha, t: matrix.row_sums()[0] })
}

fn forward(matrix: &BinaryMatrix, s: &Setup) -> Result<ForwardReport> {
    let rows = disc_exact(matrix)?;
    let cols = disc_exact(&matrix.transpose())?;
    let c = rows.disc.max(cols.disc) as f64 / (s.t as f64).sqrt();
    let k = forward_k(s.alpha, c);
    let game = MajorityMpGame::new(matrix.clone())?;
    let profile = coloring_to_profile::<f64>(&rows.coloring, &cols.coloring, k)?;
    let (regrets, max_regret) = max_signed_regret(&game, &profile)?;
    Ok(ForwardReport {
        alpha: s.alpha,
        t: s.t,
        disc_rows: rows.disc,
        disc_cols: cols.disc,
        c,
        k,
        coloring: Coloring { cols: rows.coloring, rows: Some(cols.coloring) },
        regrets,
        max_regret,
        threshold: NASH_THRESHOLD,
        passed: max_regret <= NASH_THRESHOLD + f64::regret_tol(),
    })
}

fn reverse(matrix: &BinaryMatrix, s: &Setup, k: u32, budget: Option<u64>, seed: u64) -> Result<ReverseReport> {
    check_k(k)?;
    let game = MajorityMpGame::new(matrix.clone())?;
    let (n, m) = (matrix.rows(), matrix.cols());
    let players = n + m;
    let exhaustive_total = (players <= REVERSE_EXHAUSTIVE_PLAYERS).then(|| 1u64 << players);
    let (exhaustive, count) = match (exhaustive_total, budget) {
        (Some(total), Some(b)) if total > b => (false, b),
        (Some(total), _) => (true, total),
        (None, b) => (false, b.unwrap_or(DEFAULT_REVERSE_SAMPLES)),
    };
    let bound = k as f64 * (s.alpha * s.t as f64).sqrt();
    let signs_of = |index: u64| -> Vec<i8> {
        if exhaustive {
            (0..players).map(|p| if (index >> p) & 1 == 1 { -1 } else { 1 }).collect()
        } else {
            let mut rng = derive_rng(seed, "reverse-scan", index);
            (0..players).map(|_| if rng.gen::<bool>() { -1 } else { 1 }).collect()
        }
    };
    let found: Vec<Option<(Vec<i8>, i64)>> = (0..count)
        .into_par_iter()
        .map(|index| {
            let signs = signs_of(index);
            let profile = coloring_to_profile::<f64>(&signs[n..], &signs[..n], k)?;
            let (_, max) = max_signed_regret(&game, &profile)?;
            if max > NASH_THRESHOLD + f64::regret_tol() {
                return Ok(None);
            }
            let chi = &signs[n..];
            let row_max = matrix.signed_row_sums(chi).iter().map(|v| v.abs()).max().unwrap_or(0);
            Ok(Some((signs, row_max)))
        })
        .collect::<Result<_>>()?;
    let hits: Vec<(Vec<i8>, i64)> = found.into_iter().flatten().collect();
    let violations = hits.iter().filter(|(_, r)| *r as f64 > bound + 1e-9).count() as u64;
    Ok(ReverseReport {
        alpha: s.alpha,
        t: s.t,
        k,
        bound,
        exhaustive,
        scanned: count,
        equilibria: hits.len() as u64,
        max_row_sum: hits.iter().map(|h| h.1).max(),
        violations,
        examples: hits
            .iter()
            .take(KEPT_EXAMPLES)
            .map(|(signs, _)| Coloring { cols: signs[n..].to_vec(), rows: Some(signs[..n].to_vec()) })
            .collect(),
        passed: violations == 0,
    })
}

/// Runs one direction of the correspondence.
///
/// `alpha` defaults to the measured balance ratio (a supplied value must
/// dominate it); `k` defaults to the forward choice; `budget` caps the
/// reverse scan.
pub fn equivalence_report(
    matrix: &BinaryMatrix,
    alpha: Option<f64>,
    k: Option<u32>,
    direction: Direction,
    budget: Option<u64>,
    seed: u64,
) -> Result<EquivalenceReport> {
    let s = setup(matrix, alpha)?;
    match direction {
        Direction::Forward => {
            let mut report = forward(matrix, &s)?;
            if let Some(k) = k {
                check_k(k)?;
                let game = MajorityMpGame::new(matrix.clone())?;
                let cols = report.coloring.cols.clone();
                let rows = report.coloring.rows.clone().unwrap_or_default();
                let (regrets, max_regret) = max_signed_regret(&game, &coloring_to_profile(&cols, &rows, k)?)?;
                report.k = k;
                report.regrets = regrets;
                report.max_regret = max_regret;
                report.passed = max_regret <= NASH_THRESHOLD + f64::regret_tol();
            }
            Ok(EquivalenceReport::Forward(report))
        }
        Direction::Reverse => {
            let k = match k {
                Some(k) => k,
                None => forward(matrix, &s)?.k,
            };
            Ok(EquivalenceReport::Reverse(reverse(matrix, &s, k, budget, seed)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let p = coloring_to_profile::<f64>(&[1, 1], &[1], 3).unwrap();
        assert!(p.strategies().iter().all(|s| (s.prob(0) - 2.0 / 3.0).abs() < 1e-15));
        let cols = [1, -1, 1, -1];
        let rows = [-1, 1];
        let p = coloring_to_profile::<f64>(&cols, &rows, 5).unwrap();
        for s in p.strategies() {
            let q = s.prob(0);
            assert!((q - 0.4).abs() < 1e-15 || (q - 0.6).abs() < 1e-15);
        }
        let c = profile_to_coloring(&p, 2, 5).unwrap();
        assert_eq!(c.cols, cols);
        assert_eq!(c.rows.unwrap(), rows);
        assert!(coloring_to_profile::<f64>(&cols, &rows, 4).is_err());
        assert!(profile_to_coloring(&MixedProfile::<f64>::uniform(3, 2), 1, 3).is_err());
    }

    #[test]
    fn odd_k_choice() {
        assert_eq!(forward_k(1.0, 0.0), 3);
        assert_eq!(forward_k(1.0, 1.0), 3);
        assert_eq!(forward_k(1.0, 1.2), 5);
        assert_eq!(forward_k(2.0, 1.0), 7);
    }

    #[test]
    fn one_by_one_forward() {
        let m = BinaryMatrix::identity(1);
        let EquivalenceReport::Forward(r) = equivalence_report(&m, None, None, Direction::Forward, None, 0).unwrap() else {
            panic!()
        };
        assert_eq!(r.k, 3);
        // Both players at 2/3 on +1. The row player's action gap is 2/3 and it
        // keeps mass 1/3 on the worse action; the column player keeps 2/3.
        assert!((r.regrets[0] - 2.0 / 9.0).abs() < 1e-12);
        assert!((r.regrets[1] - 4.0 / 9.0).abs() < 1e-12);
        assert!(r.max_regret <= 2.0 / 3.0);
        assert!(!r.passed);
    }

    #[test]
    fn rejects_imbalance() {
        let m: BinaryMatrix = "2 3\n1 1 1\n0 0 1\n".parse().unwrap();
        assert!(equivalence_report(&m, Some(2.0), None, Direction::Forward, None, 0).is_err());
    }
}
