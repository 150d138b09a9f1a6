//! Vertices of the grid cube around a binary-action profile.
//!
//! For a center `x ∈ [0,1]^n` (coordinate `i` is player `i`'s probability of
//! action 1) the cube has lower corner `c_i = min(⌊k x_i⌋, k − 1)` and
//! vertices `(c_i + v_i) / k` for `v ∈ {0,1}^n`. Vertex scan index `j` maps to
//! `v = j ⊕ r`, where `r` rounds `x` to its nearest vertex, so a center on the
//! grid is visited first.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::first_in_waves;
use crate::constructions::{ObserverGame, Side};
use crate::game::{Game, KUniformStrategy, MixedProfile};
use crate::seed::derive_rng;
use crate::verify::{check_weak_nash, RegretReport};
use crate::{Error, Evaluator, Result, Scalar};

pub const MAX_EXHAUSTIVE_CUBE_PLAYERS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CubeSpec<T> {
    pub center: Vec<T>,
    pub k: u32,
    pub lower: Vec<u32>,
    nearest: Vec<bool>,
}

impl<T: Scalar> CubeSpec<T> {
    pub fn new(center: Vec<T>, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("k must be at least 1".into()));
        }
        let kt = T::lit(k as f64);
        let mut lower = Vec::with_capacity(center.len());
        let mut nearest = Vec::with_capacity(center.len());
        for &x in &center {
            if !(x >= -T::input_tol() && x <= T::one() + T::input_tol()) {
                return Err(Error::Invalid(format!("cube center coordinate {x} outside [0, 1]")));
            }
            let scaled = x * kt;
            let c = (scaled + T::input_tol()).floor().to_u32().unwrap_or(0).min(k - 1);
            let offset = scaled - T::lit(c as f64);
            lower.push(c);
            nearest.push(offset >= T::lit(0.5));
        }
        Ok(CubeSpec { center, k, lower, nearest })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    /// Numerators `c_i + v_i` of a vertex.
    pub fn vertex(&self, bits: &[bool]) -> Vec<u32> {
        self.lower.iter().zip(bits).map(|(&c, &b)| c + b as u32).collect()
    }

    /// Bits of the `j`-th vertex in scan order (`n ≤ 64`).
    pub fn scan_bits(&self, j: u64) -> Vec<bool> {
        self.nearest
            .iter()
            .enumerate()
            .map(|(i, &r)| ((j >> i) & 1 == 1) != r)
            .collect()
    }

    /// Binary-action profile with `P(action 1) = numerator / k`.
    pub fn profile(&self, numerators: &[u32]) -> MixedProfile<T> {
        MixedProfile::new(
            numerators
                .iter()
                .map(|&c| KUniformStrategy::new(vec![self.k - c, c], self.k).expect("valid numerator").to_mixed())
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CubeMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// Worst player at a failing vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct VertexCertificate<T> {
    pub vertex: Vec<u32>,
    pub player: usize,
    pub regret: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case", bound = "T: Scalar")]
pub enum CubeOutcome<T> {
    Found {
        vertex: Vec<u32>,
        index: u64,
        report: RegretReport<T>,
    },
    AllFail {
        scanned: u64,
        /// Smallest max-regret over the scanned vertices.
        best_max_regret: T,
        /// One entry per sampled vertex (empty in exhaustive mode).
        certificates: Vec<VertexCertificate<T>>,
    },
}

fn vertex_report<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    spec: &CubeSpec<T>,
    bits: &[bool],
    epsilon: f64,
) -> Result<(bool, RegretReport<T>)> {
    check_weak_nash(game, &spec.profile(&spec.vertex(bits)), epsilon, 0.0, Evaluator::Exact)
}

fn worst_player<T: Scalar>(report: &RegretReport<T>) -> (usize, T) {
    report
        .per_player
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::neg_infinity()), |b, c| if c.1 > b.1 { c } else { b })
}

/// Searches the cube around `center` for an ε-Nash vertex.
pub fn cube_search<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    center: &[T],
    k: u32,
    epsilon: f64,
    mode: CubeMode,
) -> Result<CubeOutcome<T>> {
    if game.num_actions() != 2 {
        return Err(Error::NotApplicable("cube search needs a binary-action game".into()));
    }
    let n = game.num_players();
    if center.len() != n {
        return Err(Error::Dimension(format!("center has {} coordinates, expected {n}", center.len())));
    }
    let spec = CubeSpec::new(center.to_vec(), k)?;
    match mode {
        CubeMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_CUBE_PLAYERS {
                return Err(Error::guard("cube players", n as u128, MAX_EXHAUSTIVE_CUBE_PLAYERS as u128));
            }
            let total = 1u128 << n;
            let hit = first_in_waves(0, total, |j| vertex_report(game, &spec, &spec.scan_bits(j as u64), epsilon).map(|r| r.0))?;
            if let Some(j) = hit {
                let bits = spec.scan_bits(j as u64);
                let (_, report) = vertex_report(game, &spec, &bits, epsilon)?;
                return Ok(CubeOutcome::Found { vertex: spec.vertex(&bits), index: j as u64, report });
            }
            let best = (0..total as u64)
                .into_par_iter()
                .map(|j| vertex_report(game, &spec, &spec.scan_bits(j), epsilon).map(|r| r.1.max_regret()))
                .collect::<Result<Vec<T>>>()?
                .into_iter()
                .fold(T::infinity(), T::min);
            Ok(CubeOutcome::AllFail { scanned: total as u64, best_max_regret: best, certificates: Vec::new() })
        }
        CubeMode::Sampled { samples, seed } => {
            use rand::Rng;
            let results = (0..samples)
                .into_par_iter()
                .map(|r| {
                    let mut rng = derive_rng(seed, "cube-vertex", r as u64);
                    let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                    let (passed, report) = vertex_report(game, &spec, &bits, epsilon)?;
                    Ok((spec.vertex(&bits), passed, report))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(r) = results.iter().position(|x| x.1) {
                let (vertex, _, report) = results[r].clone();
                return Ok(CubeOutcome::Found { vertex, index: r as u64, report });
            }
            let best = results.iter().map(|x| x.2.max_regret()).fold(T::infinity(), T::min);
            let certificates = results
                .into_iter()
                .map(|(vertex, _, report)| {
                    let (player, regret) = worst_player(&report);
                    VertexCertificate { vertex, player, regret }
                })
                .collect();
            Ok(CubeOutcome::AllFail { scanned: samples as u64, best_max_regret: best, certificates })
        }
    }
}

/// Failure evidence at one sampled vertex of the observer-game cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ObserverCertificate<T> {
    pub sample: usize,
    /// Numerators of the matching-pennies coordinates.
    pub mp_vertex: Vec<u32>,
    pub observer: Vec<usize>,
    pub side: Side,
    pub window_probability: T,
    /// Minimum regret of that observer over its whole cube range.
    pub observer_regret: T,
    pub fails: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ObserverCubeReport<T> {
    pub b: usize,
    pub w: f64,
    pub k: u32,
    pub epsilon: f64,
    pub samples: usize,
    pub failures: usize,
    pub all_fail: bool,
    pub certificates: Vec<ObserverCertificate<T>>,
}

/// Samples vertices of the cube around the observer game's exact
/// equilibrium and certifies each failure through the pigeonhole observer.
///
/// Matching-pennies coordinates are `(k ± 1) / 2k` (odd `k`); observer
/// coordinates range over `[(k − 1)/k, 1]`, and the certificate uses the
/// observer's minimum regret over that range.
pub fn observer_cube_search<T: Scalar>(
    game: &ObserverGame,
    k: u32,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<ObserverCubeReport<T>> {
    if k % 2 == 0 {
        return Err(Error::Invalid(format!("k = {k} must be odd so that 1/2 is off the grid")));
    }
    let mp = game.num_mp_players();
    let spec = CubeSpec::new(vec![T::lit(0.5); mp], k)?;
    let kt = T::lit(k as f64);
    let (y_lo, y_hi) = (T::lit((k - 1) as f64) / kt, T::one());
    let certificates = (0..samples)
        .into_par_iter()
        .map(|r| {
            use rand::Rng;
            let mut rng = derive_rng(seed, "observer-cube-vertex", r as u64);
            let bits: Vec<bool> = (0..mp).map(|_| rng.gen()).collect();
            let mp_vertex = spec.vertex(&bits);
            let probs: Vec<T> = mp_vertex.iter().map(|&c| T::lit(c as f64) / kt).collect();
            let (observer, side) = game.pigeonhole_subset(&probs)?;
            let window_probability = game.window_probability(&observer, &probs)?;
            let observer_regret = game.min_observer_regret(&observer, &probs, y_lo, y_hi)?;
            Ok(ObserverCertificate {
                sample: r,
                mp_vertex,
                observer,
                side,
                window_probability,
                observer_regret,
                fails: observer_regret > T::lit(epsilon) + T::regret_tol(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = certificates.iter().filter(|c| c.fails).count();
    Ok(ObserverCubeReport {
        b: game.b(),
        w: game.w(),
        k,
        epsilon,
        samples,
        failures,
        all_fail: failures == samples,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ExplicitGame;

    #[test]
    fn on_grid_center_is_first() {
        let g = ExplicitGame::<f64>::constant(3, 2, 0.5).unwrap();
        let x = [1.0 / 3.0, 1.0, 0.0];
        match cube_search(&g, &x, 3, 0.0, CubeMode::Exhaustive).unwrap() {
            CubeOutcome::Found { vertex, index, .. } => {
                assert_eq!(index, 0);
                assert_eq!(vertex, vec![1, 3, 0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vertices_within_one_over_k() {
        let spec = CubeSpec::new(vec![0.2f64, 0.5, 0.99, 0.0], 5).unwrap();
        for j in 0..16 {
            for (num, &x) in spec.vertex(&spec.scan_bits(j)).iter().zip(&spec.center) {
                assert!((*num as f64 / 5.0 - x).abs() <= 0.2 + 1e-12);
            }
        }
    }

    #[test]
    fn matching_pennies_odd_k() {
        let g = ExplicitGame::<f64>::matching_pennies();
        let k = 3u32;
        // Player 0 wins on a match; with P(action 1) = p, q the regrets are
        // |2q − 1| · (own mass on the worse action).
        let lo = (k - 1) as f64 / (2 * k) as f64;
        let hi = (k + 1) as f64 / (2 * k) as f64;
        let mut best = f64::INFINITY;
        for &p in &[lo, hi] {
            for &q in &[lo, hi] {
                let r0 = if q > 0.5 { (1.0 - p) * (2.0 * q - 1.0) } else { p * (1.0 - 2.0 * q) };
                let r1 = if p > 0.5 { q * (2.0 * p - 1.0) } else { (1.0 - q) * (1.0 - 2.0 * p) };
                best = best.min(r0.max(r1));
            }
        }
        assert!(matches!(
            cube_search(&g, &[0.5, 0.5], k, 0.0, CubeMode::Exhaustive).unwrap(),
            CubeOutcome::AllFail { scanned: 4, .. }
        ));
        assert!(matches!(
            cube_search(&g, &[0.5, 0.5], k, best, CubeMode::Exhaustive).unwrap(),
            CubeOutcome::Found { .. }
        ));
        assert!(matches!(
            cube_search(&g, &[0.5, 0.5], k, best - 1e-6, CubeMode::Exhaustive).unwrap(),
            CubeOutcome::AllFail { .. }
        ));
    }

    #[test]
    fn observer_cube_small() {
        let g = ObserverGame::new(16, 1.0).unwrap();
        let r = observer_cube_search::<f64>(&g, 3, 0.1, 5, 2).unwrap();
        assert_eq!(r.certificates.len(), 5);
        assert!(r.certificates.iter().all(|c| c.observer.len() == 16));
        assert!(observer_cube_search::<f64>(&g, 4, 0.1, 5, 2).is_err());
    }
}
