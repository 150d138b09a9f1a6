//! Maximin value of a player facing finitely many opponent outcomes.
//!
//! `outcomes[o][a]` is the player's payoff for own action `a` against
//! opponent profile `o`. The value is `max_x min_o Σ_a x_a outcomes[o][a]`.

use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Maximin<T> {
    pub value: T,
    pub strategy: Vec<T>,
}

/// Above this many distinct lines the two-action case switches to the LP.
const CROSSING_LIMIT: usize = 256;

pub fn maximin<T: Scalar>(outcomes: &[Vec<T>]) -> Result<Maximin<T>> {
    let m = outcomes
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Invalid("maximin over zero opponent outcomes".into()))?;
    if m == 0 || outcomes.iter().any(|o| o.len() != m) {
        return Err(Error::Dimension("ragged outcome table".into()));
    }
    let rows = dedup(outcomes);
    match m {
        1 => Ok(Maximin {
            value: rows.iter().map(|r| r[0]).fold(T::infinity(), T::min),
            strategy: vec![T::one()],
        }),
        2 if rows.len() <= CROSSING_LIMIT => Ok(maximin_two_actions(&rows)),
        _ => maximin_lp(&rows),
    }
}

fn dedup<T: Scalar>(outcomes: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut keyed: Vec<(Vec<u64>, &Vec<T>)> = outcomes
        .iter()
        .map(|o| (o.iter().map(|v| v.as_f64().to_bits()).collect(), o))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, o)| o.clone()).collect()
}

fn lower_envelope<T: Scalar>(rows: &[Vec<T>], p: T) -> T {
    rows.iter()
        .map(|r| p * r[0] + (T::one() - p) * r[1])
        .fold(T::infinity(), T::min)
}

/// Two actions: the maximum of a concave piecewise-linear function of the
/// probability `p` of action 0 lies at an endpoint or at a pairwise crossing.
pub fn maximin_two_actions<T: Scalar>(rows: &[Vec<T>]) -> Maximin<T> {
    let mut candidates = vec![T::zero(), T::one()];
    for (i, r) in rows.iter().enumerate() {
        for s in &rows[i + 1..] {
            // p·r0 + (1−p)·r1 = p·s0 + (1−p)·s1
            let denom = (r[0] - r[1]) - (s[0] - s[1]);
            if denom != T::zero() {
                let p = (s[1] - r[1]) / denom;
                if p > T::zero() && p < T::one() {
                    candidates.push(p);
                }
            }
        }
    }
    let (p, value) = candidates
        .into_iter()
        .map(|p| (p, lower_envelope(rows, p)))
        .fold((T::zero(), T::neg_infinity()), |best, c| {
            if c.1 > best.1 {
                c
            } else {
                best
            }
        });
    Maximin {
        value,
        strategy: vec![p, T::one() - p],
    }
}

/// General case via the classical zero-sum LP, solved by a dense tableau
/// simplex with Bland's rule on the dual
/// `max Σ z_o  s.t.  Σ_o (U[o][a] + 1) z_o ≤ 1, z ≥ 0`.
pub fn maximin_lp<T: Scalar>(rows: &[Vec<T>]) -> Result<Maximin<T>> {
    let m = rows[0].len();
    let l = rows.len();
    let shift = T::one();
    let width = l + m + 1;
    let eps = T::epsilon() * T::lit(256.0);
    // constraint rows 0..m, objective row m
    let mut tab = vec![T::zero(); (m + 1) * width];
    for a in 0..m {
        for (o, r) in rows.iter().enumerate() {
            tab[a * width + o] = r[a] + shift;
        }
        tab[a * width + l + a] = T::one();
        tab[a * width + width - 1] = T::one();
    }
    for o in 0..l {
        tab[m * width + o] = -T::one();
    }
    let mut basis: Vec<usize> = (l..l + m).collect();
    let max_pivots = 50 * (l + m) + 1000;
    for _ in 0..max_pivots {
        let Some(enter) = (0..l + m).find(|&j| tab[m * width + j] < -eps) else {
            let objective = tab[m * width + width - 1];
            if objective <= eps {
                return Err(Error::Numerical("degenerate maximin LP".into()));
            }
            let shifted_value = T::one() / objective;
            let strategy = (0..m)
                .map(|a| (tab[m * width + l + a] * shifted_value).max(T::zero()))
                .collect();
            return Ok(Maximin {
                value: shifted_value - shift,
                strategy,
            });
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = T::infinity();
        for r in 0..m {
            let coef = tab[r * width + enter];
            if coef > eps {
                let ratio = tab[r * width + width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        ratio < best_ratio - eps
                            || ((ratio - best_ratio).abs() <= eps && basis[r] < basis[cur])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(pivot_row) = leave else {
            return Err(Error::Numerical("unbounded maximin LP".into()));
        };
        let pivot = tab[pivot_row * width + enter];
        for j in 0..width {
            tab[pivot_row * width + j] = tab[pivot_row * width + j] / pivot;
        }
        for r in 0..=m {
            if r == pivot_row {
                continue;
            }
            let factor = tab[r * width + enter];
            if factor != T::zero() {
                for j in 0..width {
                    let v = tab[pivot_row * width + j];
                    tab[r * width + j] = tab[r * width + j] - factor * v;
                }
            }
        }
        basis[pivot_row] = enter;
    }
    Err(Error::Numerical("simplex pivot limit reached".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_three(rows: &[Vec<f64>], steps: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let x = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    (steps - i - j) as f64 / steps as f64,
                ];
                let v = rows
                    .iter()
                    .map(|r| r.iter().zip(&x).map(|(u, p)| u * p).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn matching_pennies_half() {
        let rows = vec![vec![1.0f64, 0.0], vec![0.0, 1.0]];
        let mm = maximin(&rows).unwrap();
        assert!((mm.value - 0.5).abs() < 1e-12);
        let lp = maximin_lp(&rows).unwrap();
        assert!((lp.value - 0.5).abs() < 1e-12);
        assert!((lp.strategy[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_payoff() {
        let rows = vec![vec![0.3f64, 0.3, 0.3]; 4];
        assert!((maximin(&rows).unwrap().value - 0.3).abs() < 1e-12);
    }

    #[test]
    fn dominant_action() {
        let rows = vec![vec![0.9f64, 0.1], vec![0.8, 0.5]];
        let mm = maximin(&rows).unwrap();
        assert!((mm.value - 0.8).abs() < 1e-12);
        assert_eq!(mm.strategy[0], 1.0);
    }

    #[test]
    fn rock_paper_scissors_lp() {
        let rows = vec![
            vec![0.5f64, 1.0, 0.0],
            vec![0.0, 0.5, 1.0],
            vec![1.0, 0.0, 0.5],
        ];
        let mm = maximin(&rows).unwrap();
        assert!((mm.value - 0.5).abs() < 1e-12);
        for p in &mm.strategy {
            assert!((p - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn lp_matches_crossing_and_grid_oracles() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let l = rng.gen_range(1..8);
            let rows2: Vec<Vec<f64>> = (0..l).map(|_| vec![rng.gen(), rng.gen()]).collect();
            let a = maximin_two_actions(&rows2).value;
            let b = maximin_lp(&rows2).unwrap().value;
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            let rows3: Vec<Vec<f64>> = (0..l).map(|_| vec![rng.gen(), rng.gen(), rng.gen()]).collect();
            let lp = maximin_lp(&rows3).unwrap();
            let grid = brute_force_three(&rows3, 300);
            assert!(lp.value >= grid - 1e-9 && lp.value <= grid + 1e-2);
            let s: f64 = lp.strategy.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
